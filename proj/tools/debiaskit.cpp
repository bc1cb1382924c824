// debiaskit command-line front end.

#include "debiaskit/embedding.hpp"
#include "debiaskit/error.hpp"
#include "debiaskit/job.hpp"
#include "debiaskit/serialize.hpp"
#include "debiaskit/service.hpp"
#include "debiaskit/comparison.hpp"
#include "debiaskit/view.hpp"
#include "debiaskit/wordlists.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

using namespace debiaskit;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmbeddingArgs {
  std::string path;
  std::string format = "glove";
  std::size_t limit = 0;

  void add(CLI::App* app) {
    app->add_option("--embedding", path, "Embedding text file")->required();
    app->add_option("--format", format, "glove | word2vec")->capture_default_str();
    app->add_option("--limit", limit, "Read at most this many rows (0 = all)");
  }

  EmbeddingSnapshot load() const {
    return load_embedding_file(path, parse_format(format), limit ? std::optional<std::size_t>(limit) : std::nullopt);
  }
};

struct WeatArgs {
  std::string x, y, a, b, ect;

  void add(CLI::App* app) {
    app->add_option("--weat-x", x, "WEAT target X (inline or @file)");
    app->add_option("--weat-y", y, "WEAT target Y");
    app->add_option("--weat-a", a, "WEAT attribute A");
    app->add_option("--weat-b", b, "WEAT attribute B");
    app->add_option("--ect-attrs", ect, "ECT attribute list");
  }

  // Unset lists fall back to the bundled gender / occupation defaults.
  MetricSets sets() const {
    auto pick = [](const std::string& spec, const char* bundled, const char* label) {
      return spec.empty() ? bundled_word_set(bundled, label) : parse_word_set(spec, label);
    };
    MetricSets m;
    m.weat.x = pick(x, "gender_male", "X");
    m.weat.y = pick(y, "gender_female", "Y");
    m.weat.a = pick(a, "occupations_male", "A");
    m.weat.b = pick(b, "occupations_female", "B");
    m.ect_attributes = pick(ect, "ect_occupations", "ECT attributes");
    return m;
  }
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::NotFound, "cannot write '" + path + "'");
  out << content;
  if (!out) throw Error(ErrorKind::NotFound, "failed writing '" + path + "'");
}

std::string report_text(const char* heading, const MetricReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s snapshot=%s WEAT=%.6f%s ECT=%.6f%s\n", heading, r.snapshot_id.c_str(),
                r.weat.effect_size, r.weat.degenerate ? " (degenerate)" : "", r.ect.score,
                r.ect.degenerate ? " (degenerate)" : "");
  return buf;
}

int category_exit(const Error& e) {
  std::cerr << "error [" << to_string(e.kind()) << "]: " << e.what() << "\n";
  if (const auto* u = dynamic_cast<const UnknownTokenError*>(&e)) {
    std::cerr << "missing tokens:";
    for (const auto& t : u->missing()) std::cerr << " " << t;
    std::cerr << "\n";
  }
  const bool usage = e.kind() == ErrorKind::JobInvariant || e.kind() == ErrorKind::InvalidArgument;
  return usage ? kExitUsage : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Concept-subspace debiasing for word embeddings"};
  app.require_subcommand(1);

  // debias ------------------------------------------------------------------
  auto* debias = app.add_subcommand("debias", "Run one debiasing job and write the modified embedding");
  EmbeddingArgs d_emb;
  d_emb.add(debias);
  std::string method, subspace, label = "concept", seeds_f, seeds_m, seeds, pairs, equalize, second, eval, exclude;
  std::string out_path, out_format, trace_path, scope = "all";
  int inlp_iters = 35, iter_rounds = 2, digits = 0;
  double inlp_floor = 0.55;
  bool with_metrics = false;
  WeatArgs d_weat;
  debias->add_option("--method", method, "lp | hd | inlp | oscar")->required();
  debias->add_option("--subspace", subspace, "pca | paired-pca | two-means | classifier | iterative");
  debias->add_option("--label", label, "Concept label")->capture_default_str();
  debias->add_option("--seeds-f", seeds_f, "Seed set F");
  debias->add_option("--seeds-m", seeds_m, "Seed set M");
  debias->add_option("--seeds", seeds, "Single seed set (PCA)");
  debias->add_option("--pairs", pairs, "Seed pairs a:b (paired PCA)");
  debias->add_option("--equalize", equalize, "Equalize pairs a:b (HD)");
  debias->add_option("--second-seeds", second, "Second concept seeds (OSCaR)");
  debias->add_option("--eval", eval, "Evaluation words");
  debias->add_option("--exclude", exclude, "Words left untouched by LP");
  debias->add_option("--scope", scope, "HD projection scope: all | sets")->capture_default_str();
  debias->add_option("--inlp-max-iters", inlp_iters, "INLP iteration cap")->capture_default_str();
  debias->add_option("--inlp-floor", inlp_floor, "INLP accuracy floor")->capture_default_str();
  debias->add_option("--iterative-rounds", iter_rounds, "Rounds of the iterative subspace search")
      ->capture_default_str();
  debias->add_option("--out", out_path, "Output embedding file")->required();
  debias->add_option("--out-format", out_format, "Output format (default: input format)");
  debias->add_option("--digits", digits, "Significant digits (0 = shortest exact)")->capture_default_str();
  debias->add_option("--trace", trace_path, "Write the step trace as JSON");
  debias->add_flag("--metrics", with_metrics, "Print WEAT and ECT before and after");
  d_weat.add(debias);

  // eval --------------------------------------------------------------------
  auto* eval_cmd = app.add_subcommand("eval", "Print WEAT and ECT for an embedding");
  EmbeddingArgs e_emb;
  e_emb.add(eval_cmd);
  WeatArgs e_weat;
  e_weat.add(eval_cmd);
  bool e_json = false;
  eval_cmd->add_flag("--json", e_json, "Print the report as JSON");

  // compare -----------------------------------------------------------------
  auto* table = app.add_subcommand("compare", "Compare subspace methods by ECT and WEAT after projection");
  EmbeddingArgs t_emb;
  t_emb.add(table);
  std::string names_f, names_m;
  table->add_option("--names-f", names_f, "Female name list file");
  table->add_option("--names-m", names_m, "Male name list file");

  // neighbors ---------------------------------------------------------------
  auto* nn = app.add_subcommand("neighbors", "Nearest neighbors of a token by cosine similarity");
  EmbeddingArgs n_emb;
  n_emb.add(nn);
  std::string token;
  std::size_t k = 10;
  nn->add_option("--token", token, "Query token")->required();
  nn->add_option("-k", k, "Number of neighbors")->capture_default_str();

  // serve -------------------------------------------------------------------
  auto* serve = app.add_subcommand("serve", "Run the HTTP session service");
  std::string config_path;
  std::string registry_override;
  int port_override = -1;
  serve->add_option("--config", config_path, "Service config JSON {host, port, registry}");
  serve->add_option("--registry", registry_override, "Embedding registry JSON");
  serve->add_option("--port", port_override, "Port");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*debias) {
      auto set_or_empty = [](const std::string& spec, const char* label) {
        return spec.empty() ? WordSet{label, {}} : parse_word_set(spec, label);
      };
      DebiasJob job;
      job.method = parse_debias_method(method);
      if (!subspace.empty()) job.subspace_method = parse_subspace_method(subspace);
      else if (job.method == DebiasMethod::Inlp) job.subspace_method = SubspaceMethod::ClassifierNormal;
      else if (!pairs.empty()) job.subspace_method = SubspaceMethod::PairedPca;
      else if (!seeds.empty()) job.subspace_method = SubspaceMethod::Pca;
      job.label = label;
      job.seeds_f = set_or_empty(seeds.empty() ? seeds_f : seeds, "Seed F");
      job.seeds_m = set_or_empty(seeds_m, "Seed M");
      if (!pairs.empty()) job.pairs = parse_paired_set(pairs, "Seed pairs");
      if (!equalize.empty()) job.equalize = parse_paired_set(equalize, "Equalize");
      if (!second.empty()) job.second_subspace_seeds = parse_word_set(second, "Second concept");
      job.evaluation = set_or_empty(eval, "Evaluation");
      job.exclude = set_or_empty(exclude, "Excluded");
      if (scope == "all") job.hd_scope = HardDebiasScope::All;
      else if (scope == "sets") job.hd_scope = HardDebiasScope::Sets;
      else throw UsageError("--scope must be all or sets");
      job.inlp_max_iters = inlp_iters;
      job.inlp_accuracy_floor = inlp_floor;
      if (job.subspace_method == SubspaceMethod::Iterative) {
        IterativeConfig cfg;
        cfg.rounds = iter_rounds;
        cfg.weat_sets = d_weat.sets().weat;
        job.iterative = cfg;
      }
      if (with_metrics) job.metrics = d_weat.sets();
      job.validate();

      const EmbeddingSnapshot input = d_emb.load();
      const TraceResult result = build_trace(input, job);
      const auto format = parse_format(out_format.empty() ? d_emb.format : out_format);
      write_file(out_path, export_embedding_string(result.job.transform.output, format, {digits}));
      if (!trace_path.empty()) write_file(trace_path, job_result_json(result).dump(2) + "\n");
      if (result.trace.metrics_before) std::cout << report_text("before", *result.trace.metrics_before);
      if (result.trace.metrics_after) std::cout << report_text("after ", *result.trace.metrics_after);
      if (result.job.inlp)
        std::cout << "inlp rounds=" << result.job.inlp->rounds.size()
                  << " final_accuracy=" << result.job.inlp->final_accuracy << "\n";
      return 0;
    }
    if (*eval_cmd) {
      const MetricSets sets = e_weat.sets();
      const MetricReport report = evaluate_metrics(e_emb.load(), sets);
      if (e_json) std::cout << to_json(report).dump(2) << "\n";
      else std::cout << report_text("metrics", report);
      return 0;
    }
    if (*table) {
      const WordSet f = names_f.empty() ? bundled_word_set("names_female", "Female names")
                                        : WordSet::make("Female names", read_token_file(names_f));
      const WordSet m = names_m.empty() ? bundled_word_set("names_male", "Male names")
                                        : WordSet::make("Male names", read_token_file(names_m));
      const auto rows = compare_subspaces(t_emb.load(), default_comparison_sets(f, m));
      std::cout << format_comparison_table(rows);
      return 0;
    }
    if (*nn) {
      const EmbeddingSnapshot s = n_emb.load();
      for (const auto& n : nearest_neighbors(s, token, k)) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6f", n.similarity);
        std::cout << n.token << "\t" << buf << "\n";
      }
      return 0;
    }
    if (*serve) {
      ServiceConfig cfg = load_service_config(config_path.empty() ? std::nullopt : std::optional(config_path));
      if (!registry_override.empty()) cfg.registry_path = registry_override;
      if (port_override >= 0) cfg.port = port_override;
      return run_server(cfg);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    return category_exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}

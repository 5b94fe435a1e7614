#include "screenforge/cli.h"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "screenforge/cluster.h"
#include "screenforge/constants.h"
#include "screenforge/descriptors.h"
#include "screenforge/ingest.h"
#include "screenforge/pdenet.h"
#include "screenforge/pharmacophore.h"
#include "screenforge/screen.h"
#include "screenforge/similarity.h"
#include "screenforge/smiles.h"
#include "screenforge/util.h"

namespace screenforge {

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::kEmptyActiveSet:
      return kExitEmptyActiveSet;
    case Errc::kInvalidConfig:
    case Errc::kConfigMismatch:
    case Errc::kInvalidK:
      return kExitConfigError;
    default:
      return kExitInputError;
  }
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> flag) {
  if (flag) return *flag;
  const char* env = std::getenv("SCREENFORGE_SEED");
  if (env == nullptr || *env == '\0') return 0;
  std::string_view s(env);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(Errc::kInvalidConfig, "SCREENFORGE_SEED must be an unsigned integer");
  }
  return v;
}

namespace {

struct Io {
  std::ostream& out;
  std::ostream& err;
};

IngestResult load(const std::string& path, Io io) {
  IngestResult r = ingest(LibrarySource::from_path(path));
  for (const auto& e : r.errors) io.err << path << ": " << e << "\n";
  return r;
}

std::vector<NamedMolecule> molecules_of(const std::vector<DatasetRecord>& recs) {
  std::vector<NamedMolecule> out;
  for (const auto& r : recs) out.push_back({r.id, parse_smiles(r.canonical_smiles)});
  return out;
}

FingerprintConfig fp_config(int radius, int nbits, std::uint64_t seed) {
  FingerprintConfig c{radius, nbits, seed};
  c.validate();
  return c;
}

std::vector<int> parse_widths(const std::string& text) {
  std::vector<int> out;
  if (text.empty()) return out;
  for (const auto& part : split_csv_line(text)) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc() || ptr != part.data() + part.size() || v < 1) {
      throw Error(Errc::kInvalidConfig, "--hidden expects comma-separated positive widths");
    }
    out.push_back(v);
  }
  return out;
}

std::string yes_no(bool v) { return v ? "Yes" : "No"; }

int cmd_parse(const std::string& file, Io io) {
  IngestResult r = load(file, io);
  io.out << "id\tcanonical_smiles\tformula\n";
  for (const auto& rec : r.records) {
    io.out << rec.id << "\t" << rec.canonical_smiles << "\t"
           << molecular_formula(parse_smiles(rec.canonical_smiles)) << "\n";
  }
  io.err << fmt::format("read {} parsed {} parse_errors {} duplicates_removed {}\n", r.stats.read,
                        r.stats.parsed, r.stats.parse_errors, r.stats.duplicates_removed);
  return r.stats.parse_errors > 0 ? kExitInputError : kExitOk;
}

int cmd_descriptors(const std::string& file, const std::string& constants_path, Io io) {
  ConstantsTable table = constants_path.empty() ? ConstantsTable::defaults()
                                                : ConstantsTable::defaults().merged(ConstantsTable::load(constants_path));
  IngestResult r = load(file, io);
  io.out << "id,formula,mw,tpsa,wlogp,hbd,hba,rotatable_bonds,heavy_atoms,gi_absorption,bbb_permeant,"
            "pgp_substrate,bioavailability,lipinski_violations\n";
  for (const auto& rec : r.records) {
    Molecule m = parse_smiles(rec.canonical_smiles);
    DescriptorSet d = compute_descriptors(m, table);
    AdmetFlags a = admet_flags(d, table);
    io.out << fmt::format("{},{},{:.2f},{:.2f},{:.2f},{},{},{},{},{},{},{},{:.2f},{}\n", csv_field(rec.id),
                          molecular_formula(largest_fragment(m)), d.mw, d.tpsa, d.wlogp, d.hbd, d.hba,
                          d.rotatable_bonds, d.heavy_atoms, a.gi_high ? "High" : "Low", yes_no(a.bbb_permeant),
                          yes_no(a.pgp_substrate), a.bioavailability, lipinski_violations(d, table));
  }
  return r.stats.parse_errors > 0 ? kExitInputError : kExitOk;
}

int cmd_fingerprint(const std::string& file, const FingerprintConfig& cfg, Io io) {
  IngestResult r = load(file, io);
  for (const auto& rec : r.records) {
    io.out << rec.id << "\t" << circular_fingerprint(parse_smiles(rec.canonical_smiles), cfg).to_hex() << "\n";
  }
  return r.stats.parse_errors > 0 ? kExitInputError : kExitOk;
}

int cmd_similarity(const std::string& file_a, const std::string& file_b, const std::string& metric,
                   double cutoff, Io io) {
  if (metric != "tanimoto" && metric != "string") {
    throw Error(Errc::kInvalidConfig, "--metric must be tanimoto or string");
  }
  IngestResult a = load(file_a, io);
  IngestResult b = load(file_b, io);
  RouteComparison c = compare_routes(a.records, b.records, cutoff);
  const auto& matrix = metric == "tanimoto" ? c.tanimoto : c.string;
  io.out << "id";
  for (const auto& id : c.ids_b) io.out << "," << csv_field(id);
  io.out << "\n";
  for (std::size_t i = 0; i < c.ids_a.size(); ++i) {
    io.out << csv_field(c.ids_a[i]);
    for (double v : matrix[i]) io.out << fmt::format(",{:.6f}", v);
    io.out << "\n";
  }
  io.err << fmt::format("metric {} overlap {} of {} at tanimoto >= {}\n", metric, c.overlap, c.ids_a.size(),
                        cutoff);
  return kExitOk;
}

int cmd_cluster(const std::string& file, int k, const std::string& linkage, int picks, Io io) {
  IngestResult r = load(file, io);
  std::vector<FingerprintVector> fps;
  for (const auto& rec : r.records) fps.push_back(circular_fingerprint(parse_smiles(rec.canonical_smiles), {}));
  if (fps.size() < 2) throw Error(Errc::kInvalidK, "clustering needs at least two compounds");
  FunnelResult f = diversity_funnel(distance_matrix(fps).distances(), parse_linkage(linkage), k, picks);
  io.out << "id,cluster,representative,picked\n";
  for (std::size_t i = 0; i < r.records.size(); ++i) {
    const int label = f.clusters.labels[i];
    const bool rep = f.clusters.representatives[label] == static_cast<int>(i);
    const bool picked = std::binary_search(f.picks.begin(), f.picks.end(), static_cast<int>(i));
    io.out << fmt::format("{},{},{},{}\n", csv_field(r.records[i].id), label, yes_no(rep), yes_no(picked));
  }
  return kExitOk;
}

int cmd_train(const std::string& file, const std::string& target_name_text, TrainConfig cfg,
              const FeatureSpec& spec, const std::string& out_path, const std::string& curve_path, Io io) {
  const Target target = parse_target(target_name_text);
  IngestResult r = load(file, io);
  std::vector<DatasetRecord> records;
  for (const auto& rec : r.records) {
    if ((rec.target == target || rec.target == Target::kCustom) && rec.activity()) records.push_back(rec);
  }
  DatasetSummary s = summarize_dataset(records);
  io.out << fmt::format("dataset read {} parsed {} parse_errors {} duplicates_removed {}\n", r.stats.read,
                        r.stats.parsed, r.stats.parse_errors, r.stats.duplicates_removed);
  io.out << fmt::format("target {} records {} active {} inactive {}\n", target_name(target), s.total, s.active,
                        s.inactive);
  PdenetRun run = fit_pdenet(records, target, cfg, spec);
  save_model(run.model, out_path);
  if (!curve_path.empty()) {
    std::ofstream curve(curve_path, std::ios::binary);
    if (!curve) throw Error(Errc::kIo, "cannot write " + curve_path);
    curve << "epoch,train_mse,holdout_mse\n";
    for (std::size_t e = 0; e < run.curve.train_mse.size(); ++e) {
      curve << fmt::format("{},{:.8g},{:.8g}\n", e + 1, run.curve.train_mse[e], run.curve.holdout_mse[e]);
    }
  }
  io.out << fmt::format("split train {} test {} holdout {}\n", run.split.train.size(), run.split.test.size(),
                        run.split.holdout.size());
  if (!run.curve.train_mse.empty()) {
    io.out << fmt::format("final train_mse {:.6f} holdout_mse {:.6f}\n", run.curve.train_mse.back(),
                          run.curve.holdout_mse.back());
  }
  const Confusion& c = run.test.confusion;
  io.out << fmt::format("test mse {:.6f} r2 {:.6f} tp {} fp {} tn {} fn {}\n", run.test.mse, run.test.r2,
                        c.true_positive, c.false_positive, c.true_negative, c.false_negative);
  io.out << "model " << out_path << "\n";
  return kExitOk;
}

int cmd_predict(const std::string& file, const std::string& model_path, double threshold, Io io) {
  MlpModel model = load_model(model_path);
  IngestResult r = load(file, io);
  io.out << "id," << model.target << " pIC50,active\n";
  for (const auto& p : predict_and_gate(model, molecules_of(r.records), threshold)) {
    io.out << fmt::format("{},{:.2f},{}\n", csv_field(p.id), p.pic50, yes_no(p.active));
  }
  return kExitOk;
}

int cmd_pharm_train(const std::string& file, const GenParams& params, const std::string& out_path, Io io) {
  IngestResult r = load(file, io);
  std::vector<TrainingCompound> training;
  for (const auto& rec : r.records) {
    if (auto p = rec.activity()) training.push_back({rec.id, parse_smiles(rec.canonical_smiles), *p});
  }
  auto candidates = generate_hypotheses(training, params);
  for (auto& h : candidates) score_costs(h, training);
  const std::size_t best = select_best(candidates);
  const Hypothesis& h = candidates[best];
  save_hypothesis(h, out_path);
  std::string kinds;
  for (const auto& f : h.features) kinds += (kinds.empty() ? "" : ",") + std::string(feature_kind_name(f.kind));
  io.out << fmt::format("training {} candidates {} selected {} seed {}\n", training.size(), candidates.size(), best,
                        h.seed_id);
  io.out << fmt::format("features {}\n", kinds);
  io.out << fmt::format("null_cost {:.4f} total_cost {:.4f} delta {:.4f}\n", h.costs.null_cost, h.costs.total_cost,
                        h.costs.delta());
  io.out << "hypothesis " << out_path << "\n";
  return kExitOk;
}

int cmd_pharm_screen(const std::string& file, const std::string& hypo_path, const std::string& summary_path, Io io) {
  Hypothesis h = load_hypothesis(hypo_path);
  IngestResult r = load(file, io);
  std::vector<LibraryCompound> lib;
  for (const auto& rec : r.records) lib.push_back({rec.id, parse_smiles(rec.canonical_smiles), rec.class_label});
  auto rows = screen_by_fit(h, lib);
  io.out << "id,fit,predicted_pIC50,class\n";
  for (const auto& row : rows) {
    io.out << fmt::format("{},{:.2f},{:.2f},{}\n", csv_field(row.id), row.fit, row.predicted_pic50,
                          csv_field(row.class_label.value_or("")));
  }
  if (!summary_path.empty()) {
    std::ofstream s(summary_path, std::ios::binary);
    if (!s) throw Error(Errc::kIo, "cannot write " + summary_path);
    s << "Classify,Type of compound,Representative compounds,Quantity,Degree of fit\n";
    for (const auto& c : summarize_classes(rows)) {
      s << fmt::format("{},{},{},{},{:.2f}\n", c.classify, csv_field(c.type), csv_field(c.representative),
                       c.quantity, c.degree_of_fit);
    }
  }
  return kExitOk;
}

struct ScreenArgs {
  std::string file;
  std::vector<std::string> models;
  std::string hypothesis;
  int clusters = 0;
  int picks = 0;
  std::string out;
  std::string format;
  std::string layout = "full";
  std::string linkage = "average";
  double threshold = kActivityGate;
  int radius = 2;
  int nbits = 2048;
};

int cmd_screen(const ScreenArgs& a, std::uint64_t seed, Io io) {
  ScreenConfig cfg;
  cfg.clusters = a.clusters;
  cfg.picks = a.picks;
  cfg.linkage = parse_linkage(a.linkage);
  cfg.threshold = a.threshold;
  cfg.seed = seed;
  cfg.fingerprint = fp_config(a.radius, a.nbits, 0);
  cfg.library = std::filesystem::path(a.file).filename().string();
  const ReportFormat format = parse_report_format(
      !a.format.empty() ? a.format : (std::filesystem::path(a.out).extension() == ".md" ? "md" : "csv"));
  const ReportLayout layout = parse_report_layout(a.layout);

  std::vector<MlpModel> models;
  for (const auto& m : a.models) models.push_back(load_model(m));
  std::optional<Hypothesis> hypo;
  if (!a.hypothesis.empty()) hypo = load_hypothesis(a.hypothesis);
  IngestResult r = load(a.file, io);

  ScreeningReport report = run_screen(r.records, models, hypo, cfg);
  report.header.insert(report.header.begin() + 4,
                       {"ingest", fmt::format("read={},parsed={},parse_errors={},duplicates_removed={}", r.stats.read,
                                              r.stats.parsed, r.stats.parse_errors, r.stats.duplicates_removed)});
  write_report(report, a.out, format, layout);
  int reps = 0;
  for (const auto& row : report.rows) reps += row.representative ? 1 : 0;
  io.out << fmt::format("actives {} representatives {} report {}\n", report.rows.size(), reps, a.out);
  if (report.rows.empty()) {
    io.err << "no compound passed the activity gate\n";
    return kExitEmptyActiveSet;
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Io io{out, err};
  CLI::App app{"screenforge: ligand-based virtual screening toolkit", "screenforge"};
  app.set_version_flag("--version", "screenforge " + std::string(library_version()));
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed_flag;
  std::string file, file_b, constants_path, metric = "tanimoto", linkage = "average", target, out_path, curve_path,
                                            model_path, hypo_path, summary_path, hidden = "256,64",
                                            activation = "relu";
  int radius = 2, nbits = 2048, clusters = 0, picks = 0, epochs = 100, batch = 32, max_candidates = 255;
  double lr = 1e-3, threshold = kActivityGate, cutoff = 0.85, dropout = 0.0;
  std::uint64_t fp_seed = 0;

  auto* parse = app.add_subcommand("parse", "Parse and canonicalize a library");
  parse->add_option("file", file, "Library (.smi or .csv)")->required();

  auto* desc = app.add_subcommand("descriptors", "Physicochemical descriptors and ADMET flags");
  desc->add_option("file", file)->required();
  desc->add_option("--admet-constants", constants_path, "Constants file overriding the defaults");

  auto* fp = app.add_subcommand("fingerprint", "Circular fingerprints as hex");
  fp->add_option("file", file)->required();
  fp->add_option("--radius", radius);
  fp->add_option("--nbits", nbits);
  fp->add_option("--seed", fp_seed, "Hash seed");

  auto* sim = app.add_subcommand("similarity", "Cross-similarity of two libraries");
  sim->add_option("fileA", file)->required();
  sim->add_option("fileB", file_b)->required();
  sim->add_option("--metric", metric)->check(CLI::IsMember({"tanimoto", "string"}));
  sim->add_option("--cutoff", cutoff, "Tanimoto overlap cutoff");

  auto* clu = app.add_subcommand("cluster", "Hierarchical clustering of fingerprints");
  clu->add_option("file", file)->required();
  clu->add_option("--clusters", clusters)->required();
  clu->add_option("--linkage", linkage)->check(CLI::IsMember({"average", "single", "complete"}));
  clu->add_option("--picks", picks, "Representatives to pick (default: one per cluster)");

  auto* tr = app.add_subcommand("train", "Train a pIC50 regression model");
  tr->add_option("csv", file)->required();
  tr->add_option("--target", target)->required()->check(CLI::IsMember({"PDE4", "PDE7", "XO"}, CLI::ignore_case));
  tr->add_option("--epochs", epochs);
  tr->add_option("--lr", lr);
  tr->add_option("--batch", batch);
  tr->add_option("--hidden", hidden, "Hidden layer widths, e.g. 256,64");
  tr->add_option("--dropout", dropout);
  tr->add_option("--activation", activation)->check(CLI::IsMember({"relu", "tanh"}));
  tr->add_option("--radius", radius);
  tr->add_option("--nbits", nbits);
  tr->add_option("--seed", seed_flag);
  tr->add_option("--out", out_path)->required();
  tr->add_option("--curve", curve_path, "Write the per-epoch loss curve as csv");

  auto* pr = app.add_subcommand("predict", "Predict pIC50 and apply the activity gate");
  pr->add_option("file", file)->required();
  pr->add_option("--model", model_path)->required();
  pr->add_option("--threshold", threshold);

  auto* ph = app.add_subcommand("pharm", "Pharmacophore hypotheses");
  ph->require_subcommand(1);
  auto* ph_train = ph->add_subcommand("train", "Generate and select a hypothesis");
  ph_train->add_option("csv", file)->required();
  ph_train->add_option("--max-candidates", max_candidates);
  ph_train->add_option("--out", out_path)->required();
  auto* ph_screen = ph->add_subcommand("screen", "Rank a library by fit value");
  ph_screen->add_option("file", file)->required();
  ph_screen->add_option("--hypothesis", hypo_path)->required();
  ph_screen->add_option("--summary", summary_path, "Write the per-class summary csv");

  ScreenArgs sa;
  auto* scr = app.add_subcommand("screen", "Full screening funnel with report");
  scr->add_option("file", sa.file)->required();
  scr->add_option("--model", sa.models, "Model json (repeatable)");
  scr->add_option("--hypothesis", sa.hypothesis);
  scr->add_option("--clusters", sa.clusters)->required();
  scr->add_option("--picks", sa.picks)->required();
  scr->add_option("--out", sa.out)->required();
  scr->add_option("--format", sa.format)->check(CLI::IsMember({"csv", "md"}));
  scr->add_option("--layout", sa.layout)->check(CLI::IsMember({"full", "forecast", "compounds"}));
  scr->add_option("--linkage", sa.linkage)->check(CLI::IsMember({"average", "single", "complete"}));
  scr->add_option("--threshold", sa.threshold);
  scr->add_option("--radius", sa.radius);
  scr->add_option("--nbits", sa.nbits);
  scr->add_option("--seed", seed_flag);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (*parse) return cmd_parse(file, io);
    if (*desc) return cmd_descriptors(file, constants_path, io);
    if (*fp) return cmd_fingerprint(file, fp_config(radius, nbits, fp_seed), io);
    if (*sim) return cmd_similarity(file, file_b, metric, cutoff, io);
    if (*clu) return cmd_cluster(file, clusters, linkage, picks, io);
    if (*tr) {
      TrainConfig cfg;
      cfg.epochs = epochs;
      cfg.learning_rate = lr;
      cfg.batch_size = batch;
      cfg.hidden_layers = parse_widths(hidden);
      cfg.dropout_rate = dropout;
      cfg.activation = parse_activation(activation);
      cfg.seed = resolve_seed(seed_flag);
      FeatureSpec spec = FeatureSpec::defaults();
      spec.fingerprint = fp_config(radius, nbits, 0);
      return cmd_train(file, target, cfg, spec, out_path, curve_path, io);
    }
    if (*pr) return cmd_predict(file, model_path, threshold, io);
    if (*ph_train) {
      GenParams params;
      params.max_candidates = max_candidates;
      return cmd_pharm_train(file, params, out_path, io);
    }
    if (*ph_screen) return cmd_pharm_screen(file, hypo_path, summary_path, io);
    if (*scr) return cmd_screen(sa, resolve_seed(seed_flag), io);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  }
  return kExitConfigError;
}

}  // namespace screenforge

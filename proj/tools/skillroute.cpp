// Command-line front end. Every subcommand wraps its work in a stage so that a
// failure prints "[stage] Code: detail" and exits nonzero.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "skillroute/harness.hpp"
#include "skillroute/serialize.hpp"

namespace fs = std::filesystem;
using namespace skillroute;

namespace {

struct GlobalOptions {
  std::size_t bins = JudgementConfig{}.bin_count;
  std::size_t smooth_window = JudgementConfig{}.smoothing_window;
  double prominence = JudgementConfig{}.min_prominence;
  double height_ratio = JudgementConfig{}.height_ratio;
  double position_ratio = JudgementConfig{}.position_ratio;
  std::optional<double> separation;
  std::optional<std::uint64_t> seed;
  std::size_t parallelism = 1;
  std::string format = "table";

  JudgementConfig judgement() const {
    JudgementConfig c;
    c.bin_count = bins;
    c.smoothing_window = smooth_window;
    c.min_prominence = prominence;
    c.height_ratio = height_ratio;
    c.position_ratio = position_ratio;
    c.separation = separation;
    c.validate();
    return c;
  }
  bool records() const { return format == "records"; }
};

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + p.string());
}

json parse_json_file(const fs::path& p) {
  try {
    return json::parse(read_text(p));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, p.string() + ": " + e.what());
  }
}

NormalizationMode parse_normalization(const std::string& s) {
  return json(s).get<NormalizationMode>();
}

VolumeFormat parse_io_format(const std::string& s) {
  if (s == "nii" || s == "nifti") return VolumeFormat::Nifti;
  if (s == "svol") return VolumeFormat::Svol;
  throw Error(ErrorCode::BadConfig, "unknown io format '" + s + "' (nii|svol)");
}

ModelParams load_model(const fs::path& p) {
  const json j = parse_json_file(p);
  try {
    return j.get<ModelParams>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, p.string() + ": " + e.what());
  }
}

/// "kmeans", "classifier" or "external:<command template>".
SegmenterSpec parse_backend(const std::string& text, const std::string& model_path,
                            const std::string& io_format, double timeout) {
  if (text == "kmeans") return SegmenterSpec::make_kmeans();
  if (text == "classifier") {
    if (model_path.empty()) return SegmenterSpec::make_classifier();
    return SegmenterSpec::make_classifier(load_model(model_path));
  }
  const std::string prefix = "external:";
  if (text.rfind(prefix, 0) == 0) {
    return SegmenterSpec::make_external(
        ExternalConfig{text.substr(prefix.size()), parse_io_format(io_format), timeout});
  }
  throw Error(ErrorCode::BadConfig,
              "unknown backend '" + text + "' (kmeans | classifier | external:<command>)");
}

std::string target_name(Target t) { return t == Target::SkilledA ? "SkilledA" : "SkilledB"; }

std::string describe_decision(const RoutingDecision& d) {
  std::ostringstream out;
  char buf[160];
  out << "peaks:";
  for (const Peak& p : d.peakset.peaks) {
    std::snprintf(buf, sizeof buf, " (%zu, %.4g)", p.x, p.y);
    out << buf;
  }
  out << '\n';
  if (d.degenerate) {
    out << "degenerate: fewer than two peaks\n";
  } else {
    auto rule = [&](const char* name, const char* op, const RuleEvaluation& r) {
      std::snprintf(buf, sizeof buf, "%-10s %s  %.6g %s %.6g\n", name, r.passed ? "pass" : "fail",
                    r.lhs, op, r.rhs);
      out << buf;
    };
    rule("separation", ">", d.separation);
    rule("height", ">=", d.height);
    rule("position", "<=", d.position);
  }
  out << "target: " << target_name(d.target) << '\n';
  return out.str();
}

std::string describe_report(const EvaluationReport& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "CSF %.4f  GM %.4f  WM %.4f  macro %.4f\n", r.per_class_dsc[0],
                r.per_class_dsc[1], r.per_class_dsc[2], r.macro_dsc);
  return buf;
}

/// The extension of `out` picks the file format.
void write_labels(const LabelVolume& labels, const std::string& out) {
  if (out.empty()) throw Error(ErrorCode::BadConfig, "--out is required");
  write_volume(labels, out);
}

fs::path scratch_dir(const std::string& requested) {
  if (!requested.empty()) return requested;
  return fs::temp_directory_path() / ("skillroute-cli-" + std::to_string(::getpid()));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Histogram-routed brain tissue segmentation"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--bins", g.bins, "Histogram bin count")->capture_default_str();
  app.add_option("--smooth-window", g.smooth_window, "Odd moving-average width")
      ->capture_default_str();
  app.add_option("--prominence", g.prominence, "Peak prominence floor, fraction of max count")
      ->capture_default_str();
  app.add_option("--height-ratio", g.height_ratio, "Height rule ratio")->capture_default_str();
  app.add_option("--position-ratio", g.position_ratio, "Position rule ratio")
      ->capture_default_str();
  app.add_option("--separation", g.separation, "Separation threshold in bins (default 1/B)");
  app.add_option("--seed", g.seed, "Seed for phantoms and classifier initialization");
  app.add_option("--parallelism", g.parallelism, "Worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--format", g.format, "Output format")
      ->check(CLI::IsMember({"table", "records"}))
      ->capture_default_str();

  // Options shared by several subcommands.
  std::string volume, mask, normalization = "minmax", out, model, io_format = "nii";
  double timeout = 600;

  // phantom ------------------------------------------------------------------
  auto* phantom = app.add_subcommand("phantom", "Generate a synthetic phantom");
  std::string spec_path, out_dir, ext = "nii";
  std::vector<std::size_t> dims;
  std::vector<double> means, stddevs, fractions;
  std::optional<double> bias;
  phantom->add_option("--spec", spec_path, "Phantom spec JSON file");
  phantom->add_option("--out-dir", out_dir, "Directory for volume/labels/mask")->required();
  phantom->add_option("--ext", ext, "File format")->check(CLI::IsMember({"nii", "svol"}));
  phantom->add_option("--dims", dims)->expected(3);
  phantom->add_option("--means", means, "CSF GM WM means")->expected(3);
  phantom->add_option("--stddevs", stddevs, "CSF GM WM standard deviations")->expected(3);
  phantom->add_option("--fractions", fractions, "CSF GM WM shares of the mask")->expected(3);
  phantom->add_option("--bias", bias, "Bias field amplitude");

  // judge --------------------------------------------------------------------
  auto* judge_cmd = app.add_subcommand("judge", "Print the routing decision for one volume");
  judge_cmd->add_option("--volume", volume)->required();
  judge_cmd->add_option("--mask", mask)->required();
  judge_cmd->add_option("--normalization", normalization)
      ->check(CLI::IsMember({"minmax", "percentile"}));

  // segment ------------------------------------------------------------------
  auto* segment_cmd = app.add_subcommand("segment", "Run one backend on one volume");
  std::string backend = "kmeans";
  segment_cmd->add_option("--volume", volume)->required();
  segment_cmd->add_option("--mask", mask)->required();
  segment_cmd->add_option("--normalization", normalization)
      ->check(CLI::IsMember({"minmax", "percentile"}));
  segment_cmd->add_option("--backend", backend, "kmeans | classifier | external:<command>");
  segment_cmd->add_option("--model", model, "Trained classifier JSON");
  segment_cmd->add_option("--io-format", io_format, "External interchange format (nii|svol)");
  segment_cmd->add_option("--timeout", timeout, "External backend timeout in seconds");
  segment_cmd->add_option("--out", out, "Output label volume")->required();
  std::string workdir;
  segment_cmd->add_option("--workdir", workdir, "Scratch directory for external backends");

  // route --------------------------------------------------------------------
  auto* route_cmd = app.add_subcommand("route", "Judge a volume and run the chosen backend");
  std::string backend_a = "kmeans", backend_b = "classifier", manifest_path, subject;
  route_cmd->add_option("--volume", volume);
  route_cmd->add_option("--mask", mask);
  route_cmd->add_option("--manifest", manifest_path);
  route_cmd->add_option("--subject", subject);
  route_cmd->add_option("--normalization", normalization)
      ->check(CLI::IsMember({"minmax", "percentile"}));
  route_cmd->add_option("--backend-a", backend_a)->capture_default_str();
  route_cmd->add_option("--backend-b", backend_b)->capture_default_str();
  route_cmd->add_option("--model", model, "Trained classifier JSON");
  route_cmd->add_option("--io-format", io_format);
  route_cmd->add_option("--timeout", timeout);
  route_cmd->add_option("--out", out, "Output label volume")->required();
  route_cmd->add_option("--workdir", workdir);

  // train --------------------------------------------------------------------
  auto* train_cmd = app.add_subcommand("train", "Train the voxel classifier");
  std::string split_name;
  std::vector<std::string> subject_ids;
  TrainConfig train_cfg;
  bool three_class = false;
  train_cmd->add_option("--manifest", manifest_path)->required();
  train_cmd->add_option("--split", split_name, "Train on this split's training ids");
  train_cmd->add_option("--subjects", subject_ids, "Explicit training ids");
  train_cmd->add_option("--out", out, "Model JSON")->required();
  train_cmd->add_option("--lr", train_cfg.learning_rate)->capture_default_str();
  train_cmd->add_option("--epochs", train_cfg.epochs)->capture_default_str();
  train_cmd->add_option("--epsilon", train_cfg.epsilon)->capture_default_str();
  train_cmd->add_flag("--three-class", three_class, "Exclude background from the loss");

  // evaluate -----------------------------------------------------------------
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a prediction against ground truth");
  std::string pred, gt, id;
  evaluate_cmd->add_option("--pred", pred)->required();
  evaluate_cmd->add_option("--gt", gt)->required();
  evaluate_cmd->add_option("--mask", mask)->required();
  evaluate_cmd->add_option("--id", id);

  // experiment ---------------------------------------------------------------
  auto* experiment_cmd = app.add_subcommand("experiment", "Run all splits of a manifest");
  std::string splits_path, metric = "macro";
  experiment_cmd->add_option("--manifest", manifest_path)->required();
  experiment_cmd->add_option("--splits", splits_path, "Splits JSON (default: the manifest's)");
  experiment_cmd->add_option("--backend-a", backend_a)->capture_default_str();
  experiment_cmd->add_option("--backend-b", backend_b)->capture_default_str();
  experiment_cmd->add_option("--model", model, "Pretrained classifier (skips training)");
  experiment_cmd->add_option("--io-format", io_format);
  experiment_cmd->add_option("--timeout", timeout);
  experiment_cmd->add_option("--metric", metric, "Table metric")
      ->check(CLI::IsMember({"macro", "pooled"}));
  experiment_cmd->add_option("--lr", train_cfg.learning_rate);
  experiment_cmd->add_option("--epochs", train_cfg.epochs);
  experiment_cmd->add_option("--epsilon", train_cfg.epsilon);
  experiment_cmd->add_flag("--three-class", three_class);
  experiment_cmd->add_option("--workdir", workdir);

  CLI11_PARSE(app, argc, argv);

  const std::string command = app.get_subcommands().front()->get_name();
#ifdef _OPENMP
  omp_set_num_threads(static_cast<int>(g.parallelism));
#endif

  try {
    with_stage(command, [&] {
      if (phantom->parsed()) {
        PhantomSpec spec;
        if (!spec_path.empty()) spec = parse_json_file(spec_path).get<PhantomSpec>();
        if (!dims.empty()) spec.dims = {dims[0], dims[1], dims[2]};
        if (!means.empty()) spec.tissue_means = {means[0], means[1], means[2]};
        if (!stddevs.empty()) spec.tissue_stddevs = {stddevs[0], stddevs[1], stddevs[2]};
        if (!fractions.empty()) spec.tissue_fractions = {fractions[0], fractions[1], fractions[2]};
        if (bias) spec.bias_amplitude = *bias;
        if (g.seed) spec.seed = *g.seed;
        const Phantom p = generate_phantom(spec);
        fs::create_directories(out_dir);
        const fs::path dir = out_dir;
        const std::string suffix = "." + ext;
        write_volume(p.volume, dir / ("volume" + suffix));
        write_volume(p.labels, dir / ("labels" + suffix));
        write_volume(p.mask, dir / ("mask" + suffix));
        write_text(dir / "spec.json", json(spec).dump(2) + "\n");
        std::cout << "wrote " << (dir / ("volume" + suffix)).string() << ", labels"
                  << suffix << ", mask" << suffix << " and spec.json\n";
        return;
      }

      if (judge_cmd->parsed()) {
        const JudgementConfig cfg = g.judgement();
        const Volume v = with_stage("load", [&] { return load_scalar(volume); });
        const MaskVolume m = with_stage("load", [&] { return load_mask(mask); });
        const Volume n = with_stage("normalize", [&] {
          return normalize(v, m, parse_normalization(normalization)).first;
        });
        const RoutingDecision d = judge_volume(n, m, cfg);
        std::cout << (g.records() ? json(d).dump(2) + "\n" : describe_decision(d));
        return;
      }

      if (segment_cmd->parsed()) {
        const SegmenterSpec spec = parse_backend(backend, model, io_format, timeout);
        if (spec.kind == SegmenterSpec::Kind::VoxelClassifier && !spec.model) {
          throw Error(ErrorCode::BadConfig, "the classifier backend needs --model");
        }
        const Volume v = with_stage("load", [&] { return load_scalar(volume); });
        const MaskVolume m = with_stage("load", [&] { return load_mask(mask); });
        const Volume n = with_stage("normalize", [&] {
          return normalize(v, m, parse_normalization(normalization)).first;
        });
        const LabelVolume labels =
            with_stage("backend", [&] { return segment(spec, n, m, scratch_dir(workdir)); });
        write_labels(labels, out);
        std::cout << "wrote " << out << '\n';
        return;
      }

      if (route_cmd->parsed()) {
        const JudgementConfig cfg = g.judgement();
        const SegmenterSpec a = parse_backend(backend_a, model, io_format, timeout);
        const SegmenterSpec b = parse_backend(backend_b, model, io_format, timeout);
        for (const SegmenterSpec* s : {&a, &b}) {
          if (s->kind == SegmenterSpec::Kind::VoxelClassifier && !s->model) {
            throw Error(ErrorCode::BadConfig, "the classifier backend needs --model");
          }
        }
        RoutedResult r = [&] {
          if (!manifest_path.empty()) {
            if (subject.empty()) throw Error(ErrorCode::BadConfig, "--manifest needs --subject");
            const Manifest manifest = load_manifest(manifest_path);
            return run_routed(subject, manifest, cfg, a, b, scratch_dir(workdir));
          }
          if (volume.empty() || mask.empty()) {
            throw Error(ErrorCode::BadConfig, "give --volume and --mask, or --manifest and --subject");
          }
          const Volume v = with_stage("load", [&] { return load_scalar(volume); });
          const MaskVolume m = with_stage("load", [&] { return load_mask(mask); });
          return run_routed(v, m, parse_normalization(normalization), cfg, a, b,
                            scratch_dir(workdir));
        }();
        write_labels(r.labels, out);
        std::cout << (g.records() ? json(r.decision).dump(2) + "\n" : describe_decision(r.decision));
        return;
      }

      if (train_cmd->parsed()) {
        const Manifest manifest = load_manifest(manifest_path);
        std::vector<std::string> ids = subject_ids;
        if (!split_name.empty()) {
          const auto it = std::find_if(manifest.splits.begin(), manifest.splits.end(),
                                       [&](const Split& s) { return s.name == split_name; });
          if (it == manifest.splits.end()) {
            throw Error(ErrorCode::SplitInvalid, "no split named '" + split_name + "'");
          }
          ids.insert(ids.end(), it->train_ids.begin(), it->train_ids.end());
        }
        if (ids.empty()) throw Error(ErrorCode::BadConfig, "give --split or --subjects");
        train_cfg.include_background = !three_class;
        if (g.seed) train_cfg.seed = *g.seed;
        const TrainResult r = train_voxel_classifier(training_set(manifest, ids), train_cfg);
        json doc = r.params;
        doc["train"] = train_cfg;
        doc["training_ids"] = ids;
        doc["loss_trajectory"] = r.loss_trajectory;
        write_text(out, doc.dump(2) + "\n");
        char buf[96];
        std::snprintf(buf, sizeof buf, "loss %.6f -> %.6f over %zu epochs\n",
                      r.loss_trajectory.front(), r.loss_trajectory.back(), train_cfg.epochs);
        std::cout << buf << "wrote " << out << '\n';
        return;
      }

      if (evaluate_cmd->parsed()) {
        const LabelVolume p = with_stage("load", [&] { return load_labels(pred); });
        const LabelVolume t = with_stage("load", [&] { return load_labels(gt); });
        const MaskVolume m = with_stage("load", [&] { return load_mask(mask); });
        const EvaluationReport r = evaluate_volume(p, t, m, id);
        std::cout << (g.records() ? json(r).dump(2) + "\n" : describe_report(r));
        return;
      }

      if (experiment_cmd->parsed()) {
        const Manifest manifest = load_manifest(manifest_path);
        const std::vector<Split> splits =
            splits_path.empty() ? manifest.splits : load_splits(splits_path, manifest);
        ExperimentOptions opts;
        opts.judgement = g.judgement();
        opts.backend_a = parse_backend(backend_a, model, io_format, timeout);
        opts.backend_b = parse_backend(backend_b, model, io_format, timeout);
        opts.train = train_cfg;
        opts.train.include_background = !three_class;
        if (g.seed) opts.train.seed = *g.seed;
        opts.parallelism = g.parallelism;
        opts.workdir = workdir;
        const ExperimentReport r = run_experiment(manifest, splits, opts);
        std::cout << emit_report(r, g.records() ? ReportFormat::Records : ReportFormat::Table,
                                 metric == "pooled" ? TableMetric::Pooled : TableMetric::MeanMacro);
        if (!g.records()) {
          for (const SplitResult& s : r.splits)
            for (const SubjectResult& sub : s.subjects)
              if (sub.error) std::cerr << s.split.name << "/" << sub.id << ": " << *sub.error << '\n';
        }
        return;
      }
    });
  } catch (const Error& e) {
    std::cerr << "skillroute " << command << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "skillroute " << command << ": [" << command << "] " << e.what() << '\n';
    return 2;
  }
  return 0;
}

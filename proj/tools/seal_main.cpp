// Command-line front end: generate and check watermarked noise fields,
// inspect tampering, evaluate detection probabilities, and run the
// simulation harness.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "seal/attacks.hpp"
#include "seal/channel.hpp"
#include "seal/detection.hpp"
#include "seal/errors.hpp"
#include "seal/harness.hpp"
#include "seal/noisefield.hpp"
#include "seal/semantic.hpp"
#include "seal/tamper.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;

seal::Salt resolve_salt(const std::string& flag_value, bool allow_default) {
  if (!flag_value.empty()) {
    return seal::Salt::from_hex(flag_value);
  }
  if (const char* env = std::getenv("SEAL_SALT_HEX")) {
    return seal::Salt::from_hex(env);
  }
  if (allow_default) {
    return seal::Salt{};
  }
  throw seal::ValidationError(
      "no salt given: pass --salt-hex or set SEAL_SALT_HEX");
}

seal::Seed256 parse_seed(const std::string& hex) {
  seal::Seed256 seed{};
  if (hex.empty()) return seed;
  const auto raw = seal::from_hex(hex);
  if (raw.size() != seed.size()) {
    throw seal::ValidationError("seed must be 32 bytes (64 hex characters)");
  }
  std::copy(raw.begin(), raw.end(), seed.begin());
  return seed;
}

seal::Layout parse_layout(const std::string& text) {
  if (text.empty()) return seal::default_layout();
  seal::Layout L;
  std::uint32_t* fields[5] = {&L.channels, &L.height, &L.width, &L.patch_rows,
                              &L.patch_cols};
  std::size_t pos = 0;
  for (int i = 0; i < 5; ++i) {
    std::size_t next = text.find(',', pos);
    const std::string part = text.substr(
        pos, next == std::string::npos ? std::string::npos : next - pos);
    if (part.empty() || (i < 4 && next == std::string::npos) ||
        (i == 4 && next != std::string::npos)) {
      throw seal::ValidationError("layout must be c,h,w,patch_rows,patch_cols");
    }
    *fields[i] = static_cast<std::uint32_t>(std::stoul(part));
    pos = next == std::string::npos ? text.size() : next + 1;
  }
  L.validate();
  return L;
}

seal::SemanticVector resolve_vector(const std::string& vector_path,
                                    const std::string& text,
                                    const std::string& mock_salt_hex) {
  if (!vector_path.empty() && !text.empty()) {
    throw seal::ValidationError("pass either --vector or --text, not both");
  }
  if (!vector_path.empty()) {
    return seal::load_vector(vector_path);
  }
  if (!text.empty()) {
    auto spec = seal::ProviderSpec::mock(
        mock_salt_hex.empty() ? std::vector<std::uint8_t>{}
                              : seal::from_hex(mock_salt_hex));
    return seal::embed_text(text, spec);
  }
  throw seal::ValidationError("a semantic vector is required: --vector or --text");
}

void emit(const json& doc, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << doc.dump(2) << '\n';
  } else {
    seal::write_report(doc, out_path);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semantics-keyed initial-noise watermarking toolkit"};
  app.require_subcommand(1);

  // --- gen ---------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "Generate a watermarked noise field");
  std::string gen_vector, gen_text, gen_mock_salt, gen_salt, gen_layout, gen_out;
  int gen_bits = seal::kDefaultBitsPerPatch;
  gen->add_option("--vector", gen_vector, "Semantic vector JSON file");
  gen->add_option("--text", gen_text, "Text for the mock embedding provider");
  gen->add_option("--mock-salt-hex", gen_mock_salt, "Mock provider salt (hex)");
  gen->add_option("--salt-hex", gen_salt, "Secret salt, 64 hex chars");
  gen->add_option("--layout", gen_layout, "c,h,w,patch_rows,patch_cols");
  gen->add_option("--bits", gen_bits, "Projections per patch");
  gen->add_option("--out", gen_out, "Output .nf path")->required();

  // --- detect ------------------------------------------------------------
  auto* det = app.add_subcommand("detect", "Run watermark detection on a field");
  std::string det_vector, det_text, det_mock_salt, det_salt, det_in, det_out,
      det_channel_seed;
  int det_bits = seal::kDefaultBitsPerPatch;
  double det_tau = seal::kDefaultMatchTau;
  double det_sigma = 0.0;
  std::optional<std::size_t> det_threshold;
  std::optional<double> det_theta_mid;
  det->add_option("--vector", det_vector, "Semantic vector JSON file");
  det->add_option("--text", det_text, "Text for the mock embedding provider");
  det->add_option("--mock-salt-hex", det_mock_salt, "Mock provider salt (hex)");
  det->add_option("--salt-hex", det_salt, "Secret salt, 64 hex chars");
  det->add_option("--inverted", det_in, "Recovered noise field (.nf)")->required();
  det->add_option("--tau", det_tau, "Per-patch distance threshold");
  det->add_option("--bits", det_bits, "Projections per patch");
  det->add_option("--match-threshold", det_threshold,
                  "Fixed match-count threshold");
  det->add_option("--theta-mid", det_theta_mid,
                  "Analytic threshold angle (floor(n*rho(theta_mid)))");
  det->add_option("--sigma", det_sigma,
                  "Simulated inversion error applied to the loaded field");
  det->add_option("--channel-seed-hex", det_channel_seed,
                  "Seed for the simulated inversion");
  det->add_option("--out", det_out, "Write the decision JSON here instead of stdout");

  // --- inspect -----------------------------------------------------------
  auto* ins = app.add_subcommand(
      "inspect", "Per-patch bit recovery heatmap and spatial tamper test");
  std::string ins_salt, ins_in, ins_out, ins_channel_seed;
  int ins_bits = seal::kDefaultBitsPerPatch;
  double ins_sigma = 0.0;
  std::size_t ins_max_clusters = seal::kDefaultMaxClusterCount;
  bool ins_no_grid = false;
  ins->add_option("--salt-hex", ins_salt, "Secret salt, 64 hex chars");
  ins->add_option("--inverted", ins_in, "Recovered noise field (.nf)")->required();
  ins->add_option("--bits", ins_bits, "Projections per patch");
  ins->add_option("--sigma", ins_sigma,
                  "Simulated inversion error applied to the loaded field");
  ins->add_option("--channel-seed-hex", ins_channel_seed,
                  "Seed for the simulated inversion");
  ins->add_option("--max-clusters", ins_max_clusters,
                  "Cluster-count cutoff for the tamper verdict");
  ins->add_flag("--no-grid", ins_no_grid, "Suppress the text heatmap grid");
  ins->add_option("--out", ins_out, "Write the inspection JSON here");

  // --- prob --------------------------------------------------------------
  auto* prob = app.add_subcommand(
      "prob", "Exact detection probability for a semantic angle");
  double prob_theta = 0.0;
  double prob_theta_mid = seal::kDefaultThetaMidDegrees;
  std::size_t prob_n = 1024;
  int prob_b = seal::kDefaultBitsPerPatch;
  prob->add_option("--theta", prob_theta, "Angle between the embeddings")->required();
  prob->add_option("--theta-mid", prob_theta_mid, "Related/unrelated split angle");
  prob->add_option("--n", prob_n, "Number of patches");
  prob->add_option("--b", prob_b, "Projections per patch");

  // --- simulate ----------------------------------------------------------
  auto* sim = app.add_subcommand("simulate", "Run the experiment harness");
  std::string sim_config, sim_attack, sim_salt, sim_seed, sim_out;
  std::size_t sim_trials = 200;
  double sim_sigma = 0.4;
  bool sim_sweep = false;
  std::size_t sim_sweep_trials = 64;
  std::vector<double> sim_curve;
  sim->add_option("--config", sim_config, "Experiment config JSON file");
  sim->add_option("--attack", sim_attack,
                  "One of: cat, forgery_reuse, steg_average, erase_fraction");
  sim->add_option("--curve", sim_curve,
                  "Angles (degrees) for an analytic-vs-MC detection curve")
      ->delimiter(',');
  sim->add_option("--trials", sim_trials, "Trials per experiment");
  sim->add_option("--sigma", sim_sigma, "Channel error scale");
  sim->add_option("--salt-hex", sim_salt, "Secret salt (default: zero salt)");
  sim->add_option("--seed-hex", sim_seed, "Master RNG seed (default: zero)");
  sim->add_flag("--sweep", sim_sweep, "Run the patch/bit grid sweep instead");
  sim->add_option("--sweep-trials", sim_sweep_trials, "Trials per sweep cell");
  sim->add_option("--out", sim_out, "Report path (default: stdout)");

  // --- roc ---------------------------------------------------------------
  auto* roc = app.add_subcommand("roc", "ROC-AUC of two score files");
  std::string roc_pos, roc_neg;
  roc->add_option("--positive", roc_pos, "JSON array of positive scores")->required();
  roc->add_option("--negative", roc_neg, "JSON array of negative scores")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (gen->parsed()) {
      const auto v = resolve_vector(gen_vector, gen_text, gen_mock_salt);
      const auto salt = resolve_salt(gen_salt, false);
      const auto layout = parse_layout(gen_layout);
      const seal::NoiseField field =
          seal::generate_watermarked_noise(v, salt, layout, gen_bits);
      seal::save(field, gen_out);
      std::cerr << "wrote " << gen_out << " (" << layout.num_patches()
                << " patches x " << layout.patch_len() << " scalars)\n";
    } else if (det->parsed()) {
      const auto v = resolve_vector(det_vector, det_text, det_mock_salt);
      const auto salt = resolve_salt(det_salt, false);
      seal::NoiseField field = seal::load(det_in);
      if (det_sigma > 0.0) {
        field = seal::invert(field,
                             {det_sigma, parse_seed(det_channel_seed)});
      }
      if (det_threshold.has_value() && det_theta_mid.has_value()) {
        throw seal::ValidationError(
            "pass either --match-threshold or --theta-mid, not both");
      }
      const std::size_t threshold =
          det_theta_mid.has_value()
              ? seal::default_match_threshold(field.layout.num_patches(),
                                              det_bits, *det_theta_mid)
              : det_threshold.value_or(seal::kDefaultFixedMatchThreshold);
      const seal::MatchMap map =
          seal::match_map(v, field, salt, det_bits, det_tau);
      seal::DetectionDecision decision;
      decision.match_count = map.match_count();
      decision.match_threshold = threshold;
      decision.watermarked = decision.match_count >= threshold;
      json doc;
      doc["decision"] = decision;
      doc["match_map"] = map;
      emit(doc, det_out);
    } else if (ins->parsed()) {
      const auto salt = resolve_salt(ins_salt, false);
      seal::NoiseField field = seal::load(ins_in);
      if (ins_sigma > 0.0) {
        field = seal::invert(field,
                             {ins_sigma, parse_seed(ins_channel_seed)});
      }
      const seal::Heatmap heat = seal::compute_heatmap(field, salt, ins_bits);
      const seal::TamperReport report = seal::spatial_test(heat, ins_max_clusters);
      if (!ins_no_grid) {
        std::cout << seal::render_heatmap_text(heat);
      }
      json doc;
      doc["heatmap"] = heat;
      doc["tamper_report"] = report;
      emit(doc, ins_out);
    } else if (prob->parsed()) {
      const double value =
          seal::detection_probability(prob_theta, prob_theta_mid, prob_n, prob_b);
      std::cout.precision(12);
      std::cout << value << '\n';
    } else if (sim->parsed()) {
      if (sim_sweep) {
        seal::SweepParams params;
        params.trials = sim_sweep_trials;
        params.sigma = sim_sigma;
        params.salt = resolve_salt(sim_salt, true);
        params.rng_seed = parse_seed(sim_seed);
        emit(seal::run_parameter_sweep(params), sim_out);
      } else if (!sim_curve.empty()) {
        seal::DetectionCurveParams params;
        params.sigma = sim_sigma;
        params.salt = resolve_salt(sim_salt, true);
        params.rng_seed = parse_seed(sim_seed);
        const auto curve = seal::detection_curve(sim_curve, sim_trials, params);
        json points = json::array();
        for (const auto& point : curve) {
          points.push_back(json{{"theta_deg", point.theta_deg},
                                {"analytic", point.analytic},
                                {"monte_carlo", point.monte_carlo},
                                {"trials", point.trials}});
        }
        emit(json{{"schema_version", 1},
                  {"sigma", sim_sigma},
                  {"curve", points}},
             sim_out);
      } else if (!sim_config.empty()) {
        std::ifstream in(sim_config);
        if (!in) {
          throw seal::IoError("cannot open config: " + sim_config);
        }
        json doc;
        try {
          in >> doc;
        } catch (const json::exception& e) {
          throw seal::ValidationError(std::string("malformed config JSON: ") +
                                      e.what());
        }
        auto cfg = seal::ExperimentConfig::from_json(doc);
        const json report = seal::run_experiment(cfg);
        const std::string out =
            !sim_out.empty() ? sim_out : cfg.report_path;
        emit(report, out);
      } else if (!sim_attack.empty()) {
        seal::ExperimentConfig cfg;
        cfg.salt = resolve_salt(sim_salt, true);
        cfg.rng_seed = parse_seed(sim_seed);
        cfg.trials = sim_trials;
        cfg.channel_sigma = sim_sigma;
        seal::AttackSpec spec;
        if (sim_attack == "cat") {
          spec.kind = seal::AttackSpec::Kind::cat;
        } else if (sim_attack == "forgery_reuse") {
          spec.kind = seal::AttackSpec::Kind::forgery_reuse;
        } else if (sim_attack == "steg_average") {
          spec.kind = seal::AttackSpec::Kind::steg_average;
        } else if (sim_attack == "erase_fraction") {
          spec.kind = seal::AttackSpec::Kind::erase_fraction;
        } else {
          throw seal::ValidationError("unknown attack kind: " + sim_attack);
        }
        cfg.attacks.push_back(spec);
        emit(seal::run_experiment(cfg), sim_out);
      } else {
        throw seal::ValidationError(
            "simulate needs --config, --attack, or --sweep");
      }
    } else if (roc->parsed()) {
      const auto load_scores = [](const std::string& path) {
        std::ifstream in(path);
        if (!in) {
          throw seal::IoError("cannot open score file: " + path);
        }
        json doc;
        try {
          in >> doc;
        } catch (const json::exception& e) {
          throw seal::ValidationError(std::string("malformed score JSON: ") +
                                      e.what());
        }
        return doc.get<std::vector<double>>();
      };
      const auto pos = load_scores(roc_pos);
      const auto neg = load_scores(roc_neg);
      json doc;
      doc["auc"] = seal::roc_auc(pos, neg);
      std::cout << doc.dump(2) << '\n';
    }
  } catch (const seal::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const seal::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitOk;
}

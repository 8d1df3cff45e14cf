// deep-mou: simulate corpora, fit Deep MoU / MoU-EM, evaluate partitions.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <mutex>
#include <sstream>

#include "cli_support.hpp"
#include "deep_mou/chain_io.hpp"
#include "deep_mou/errors.hpp"
#include "deep_mou/metrics.hpp"
#include "deep_mou/model.hpp"
#include "deep_mou/mou_em.hpp"
#include "deep_mou/parallel.hpp"
#include "deep_mou/simulate.hpp"

namespace fs = std::filesystem;
using namespace deepmou;
using namespace deepmou::cli;

namespace {

struct InputOpts {
  std::string input;
  std::string format = "auto";
  bool label_column = false;
};

struct SamplerOpts {
  SamplerConfig cfg;
  std::size_t progress_every = 500;
};

void add_input(CLI::App* sub, InputOpts& in) {
  sub->add_option("--input,-i", in.input, "Document-term matrix")->required();
  sub->add_option("--format", in.format, "auto, triplets or csv")
      ->check(CLI::IsMember({"auto", "triplets", "csv"}))
      ->capture_default_str();
  sub->add_flag("--label-column", in.label_column, "First CSV column holds class labels");
}

void add_sampler(CLI::App* sub, SamplerOpts& s) {
  auto& c = s.cfg;
  sub->add_option("--iterations", c.iterations)->capture_default_str();
  sub->add_option("--burn-in", c.burn_in)->capture_default_str();
  sub->add_option("--thin", c.thin)->capture_default_str();
  sub->add_option("--delta", c.delta, "Dirichlet prior on the weights")->capture_default_str();
  sub->add_option("--alpha-step", c.alpha_step)->capture_default_str();
  sub->add_option("--beta-step", c.beta_step_rel, "Log-scale step for beta")->capture_default_str();
  sub->add_option("--alpha-block", c.alpha_block, "0 = whole row")->capture_default_str();
  sub->add_option("--beta-block", c.beta_block, "0 = whole row")->capture_default_str();
  sub->add_option("--progress-every", s.progress_every, "0 disables progress")
      ->capture_default_str();
}

ProgressFn progress_printer(std::size_t every, std::size_t total, std::string tag) {
  if (every == 0) return nullptr;
  return [every, total, tag](std::size_t it, double lp, const MhCounts& mh) {
    if ((it + 1) % every != 0 && it + 1 != total) return;
    std::ostringstream line;
    line << tag << "iter " << it + 1 << '/' << total << " lp " << std::fixed
         << std::setprecision(2) << lp << " acc alpha " << std::setprecision(3)
         << mh.alpha.rate() << " beta " << mh.beta.rate() << '\n';
    std::cerr << line.str();
  };
}

std::vector<std::size_t> parse_range(const std::string& text) {
  std::size_t lo = 0, hi = 0;
  const auto sep = text.find_first_of(".-:");
  try {
    if (sep == std::string::npos) {
      lo = hi = std::stoul(text);
    } else {
      lo = std::stoul(text.substr(0, sep));
      hi = std::stoul(text.substr(text.find_first_not_of(".-:", sep)));
    }
  } catch (const std::exception&) {
    throw CLI::ValidationError("--k2-range", "expected a range like 1..5");
  }
  if (lo == 0 || hi < lo) throw CLI::ValidationError("--k2-range", "expected 1 <= lo <= hi");
  std::vector<std::size_t> out;
  for (std::size_t k = lo; k <= hi; ++k) out.push_back(k);
  return out;
}

// Truth files lack weights; fill them uniformly.
DeepMouParams init_params_from_json(const Json& j) {
  Json full = j;
  const std::size_t k1 = j.at("k1").get<std::size_t>();
  const std::size_t k2 = j.at("k2").get<std::size_t>();
  if (!full.contains("pi2")) full["pi2"] = std::vector<double>(k2, 1.0 / static_cast<double>(k2));
  if (!full.contains("pi1")) full["pi1"] = matrix_to_json(Matrix(k1, k2, 1.0 / static_cast<double>(k1)));
  return params_from_json(full);
}

LabelVector final_partition(const SparseDocTermMatrix& x, const ChainTrace& trace,
                            const std::string& rule, unsigned threads) {
  if (rule == "posterior-mean") return posterior_assignment(x, posterior_mean(trace), threads).hard;
  return consensus_partition(trace);
}

void write_csv_series(const fs::path& path, const std::string& header,
                      const std::vector<double>& values) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << header << '\n' << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t i = 0; i < values.size(); ++i) out << i + 1 << ',' << values[i] << '\n';
}

void write_sim(const SimOutput& sim, const fs::path& dir, Manifest& m) {
  ensure_dir(dir);
  write_triplets(dir / "matrix.txt", sim.x);
  write_labels(dir / "labels_z1.txt", sim.true_z1);
  m.artifacts = {"matrix.txt", "labels_z1.txt"};
  if (sim.config.study != Study::FlatGenerative) {
    write_labels(dir / "labels_z2.txt", sim.true_z2);
    m.artifacts.push_back("labels_z2.txt");
  }
  write_json(dir / "truth.json", truth_to_json(sim));
  m.artifacts.push_back("truth.json");
  m.seed = sim.config.seed;
  m.write(dir);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deep Mixtures of Unigrams: simulation, fitting and evaluation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(DEEP_MOU_VERSION));
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_help_all_flag("--help-all");

  unsigned threads = default_threads();
  std::string config_unused;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_unused, "JSON file of flag values; flags win");
    sub->add_option("--threads", threads, "Worker threads (env DEEP_MOU_THREADS)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  };

  // simulate
  SimConfig sim_cfg;
  std::string study = "deep";
  std::string sim_out;
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic corpus");
  common(simulate);
  simulate->add_option("--study", study, "deep, flat or grid")->capture_default_str();
  simulate->add_option("--n", sim_cfg.n, "Documents")->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--T", sim_cfg.n_terms, "Terms")->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--k1", sim_cfg.k1)->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--k2", sim_cfg.k2)->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--N", sim_cfg.poisson_n, "Poisson mean document length")->capture_default_str();
  simulate->add_option("--beta-max", sim_cfg.beta_max)->capture_default_str();
  simulate->add_option("--seed", sim_cfg.seed)->capture_default_str();
  simulate->add_option("--out,-o", sim_out, "Output directory")->required();

  // fit
  InputOpts fit_in;
  SamplerOpts fit_s;
  std::string model = "deep", fit_out, init_params, assign_rule = "consensus";
  std::size_t fit_k1 = 0, fit_k2 = 1;
  EmConfig em;
  auto* fit = app.add_subcommand("fit", "Fit Deep MoU (MCMC) or MoU (EM)");
  common(fit);
  add_input(fit, fit_in);
  fit->add_option("--model", model)->check(CLI::IsMember({"deep", "mou-em"}))->capture_default_str();
  fit->add_option("--k1", fit_k1, "Clusters")->required()->check(CLI::PositiveNumber);
  fit->add_option("--k2", fit_k2, "Hidden components (deep)")->check(CLI::PositiveNumber)->capture_default_str();
  add_sampler(fit, fit_s);
  fit->add_option("--seed", fit_s.cfg.seed)->capture_default_str();
  fit->add_option("--init-params", init_params, "Starting parameters (JSON)");
  fit->add_option("--assign", assign_rule, "consensus or posterior-mean")
      ->check(CLI::IsMember({"consensus", "posterior-mean"}))
      ->capture_default_str();
  fit->add_option("--restarts", em.restarts, "EM restarts")->check(CLI::PositiveNumber)->capture_default_str();
  fit->add_option("--max-iters", em.max_iters, "EM iteration cap")->capture_default_str();
  fit->add_option("--tol", em.tol, "EM relative tolerance")->capture_default_str();
  fit->add_option("--out,-o", fit_out, "Output directory")->required();

  // eval
  std::string pred_path, truth_path, eval_out;
  auto* eval = app.add_subcommand("eval", "Compare a partition with the truth");
  common(eval);
  eval->add_option("--pred", pred_path)->required()->check(CLI::ExistingFile);
  eval->add_option("--truth", truth_path)->required()->check(CLI::ExistingFile);
  eval->add_option("--out,-o", eval_out, "Also write the JSON here");

  // recover
  std::string rec_truth, rec_chain, rec_out;
  auto* recover = app.add_subcommand("recover", "Parameter recovery distances");
  common(recover);
  recover->add_option("--truth", rec_truth, "truth.json from simulate")->required()->check(CLI::ExistingFile);
  recover->add_option("--chain", rec_chain, "chain.jsonl from fit")->required()->check(CLI::ExistingFile);
  recover->add_option("--out,-o", rec_out, "Also write the JSON here");

  // sweep-k2
  InputOpts sw_in;
  SamplerOpts sw_s;
  std::string sw_truth, sw_range = "1..5", sw_out, sw_rule = "consensus";
  std::size_t sw_k1 = 0;
  auto* sweep = app.add_subcommand("sweep-k2", "Fit Deep MoU over a range of k2");
  common(sweep);
  add_input(sweep, sw_in);
  sweep->add_option("--truth", sw_truth, "True labels")->required()->check(CLI::ExistingFile);
  sweep->add_option("--k1", sw_k1)->required()->check(CLI::PositiveNumber);
  sweep->add_option("--k2-range", sw_range, "lo..hi")->capture_default_str();
  add_sampler(sweep, sw_s);
  sweep->add_option("--seed", sw_s.cfg.seed)->capture_default_str();
  sweep->add_option("--assign", sw_rule)
      ->check(CLI::IsMember({"consensus", "posterior-mean"}))
      ->capture_default_str();
  sweep->add_option("--out,-o", sw_out, "Output directory");

  std::vector<std::string> args;
  try {
    args = expand_config(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  Manifest manifest;
  manifest.argv = args;
  try {
    if (*simulate) {
      sim_cfg.study = parse_study(study);
      manifest.command = "simulate";
      manifest.config = resolved_config(*simulate);
      const fs::path dir = sim_out;
      if (sim_cfg.study == Study::RecoveryGrid) {
        RngStream rng(sim_cfg.seed, 0);
        const auto cells = recovery_grid(rng);
        std::vector<std::string> subdirs;
        for (const auto& cell : cells) {
          const std::string name = "n" + std::to_string(cell.config.n) + "_N" +
                                   std::to_string(static_cast<long>(cell.config.poisson_n)) +
                                   "_T" + std::to_string(cell.config.n_terms);
          Manifest cm = manifest;
          write_sim(cell, dir / name, cm);
          subdirs.push_back(name);
        }
        manifest.seed = sim_cfg.seed;
        manifest.artifacts = subdirs;
        manifest.write(dir);
      } else {
        sim_cfg.validate();
        write_sim(generate(sim_cfg), dir, manifest);
      }
      return 0;
    }

    if (*fit) {
      manifest.command = "fit";
      manifest.config = resolved_config(*fit);
      const SparseDocTermMatrix x = load_matrix(fit_in.input, fit_in.format, fit_in.label_column);
      const fs::path dir = fit_out;
      ensure_dir(dir);
      if (model == "mou-em") {
        em.seed = fit_s.cfg.seed;
        em.threads = threads;
        const EmResult r = em_fit(x, fit_k1, em);
        write_json(dir / "model.json", mou_to_json(r.params));
        write_labels(dir / "partition.txt", mou_assign(x, r.params));
        write_csv_series(dir / "log_likelihood.csv", "iteration,log_likelihood", r.log_lik_trace);
        manifest.artifacts = {"model.json", "partition.txt", "log_likelihood.csv"};
        manifest.seed = em.seed;
        std::cerr << "EM: " << r.log_lik_trace.size() << " iterations, log likelihood "
                  << r.log_lik_trace.back() << " (restart " << r.restart << ")\n";
      } else {
        SamplerConfig cfg = fit_s.cfg;
        cfg.threads = threads;
        std::optional<DeepMouParams> init;
        if (!init_params.empty()) init = init_params_from_json(read_json(init_params));
        const ChainTrace trace =
            run_chain(x, fit_k1, fit_k2, cfg, init,
                      progress_printer(fit_s.progress_every, cfg.iterations, ""));
        if (trace.states.empty()) throw std::runtime_error("no states kept");
        write_chain_jsonl(dir / "chain.jsonl", trace);
        write_log_posterior_csv(dir / "log_posterior.csv", trace);
        write_json(dir / "posterior_mean.json", params_to_json(posterior_mean(trace)));
        write_labels(dir / "partition.txt", final_partition(x, trace, assign_rule, threads));
        manifest.artifacts = {"chain.jsonl", "log_posterior.csv", "posterior_mean.json",
                              "partition.txt"};
        manifest.seed = cfg.seed;
        std::cerr << "acceptance alpha " << trace.mh_total.alpha.rate() << " beta "
                  << trace.mh_total.beta.rate() << '\n';
      }
      manifest.write(dir);
      return 0;
    }

    if (*eval) {
      const LabelVector pred = load_labels(pred_path);
      const LabelVector truth = load_labels(truth_path);
      if (pred.size() != truth.size()) {
        throw DimensionError("label files have different lengths: " +
                             std::to_string(pred.size()) + " vs " + std::to_string(truth.size()));
      }
      const Json out{{"ari", adjusted_rand_index(pred, truth)},
                     {"accuracy", matched_accuracy(pred, truth)},
                     {"n", pred.size()},
                     {"k_pred", pred.k},
                     {"k_true", truth.k}};
      std::cout << out.dump() << '\n';
      if (!eval_out.empty()) write_json(eval_out, out);
      return 0;
    }

    if (*recover) {
      const Json truth = read_json(rec_truth);
      const Matrix true_beta = matrix_from_json(truth.at("beta"));
      const Matrix true_alpha = matrix_from_json(truth.at("alpha"));
      const ChainTrace trace = read_chain_jsonl(rec_chain);
      if (trace.states.empty()) throw std::runtime_error("chain dump is empty");
      const DeepMouParams mean = posterior_mean(trace);
      if (mean.beta.rows() != true_beta.rows() || mean.beta.cols() != true_beta.cols() ||
          mean.alpha.rows() != true_alpha.rows() || mean.alpha.cols() != true_alpha.cols()) {
        throw DimensionError("chain and truth disagree on k1, k2 or T");
      }
      const auto beta_d = recovery_distance(true_beta, mean.beta);
      const auto alpha_d = recovery_distance(true_alpha, mean.alpha);
      auto avg = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double e : v) s += e;
        return v.empty() ? 0.0 : s / static_cast<double>(v.size());
      };
      const Json out{{"beta", beta_d},
                     {"alpha", alpha_d},
                     {"beta_mean", avg(beta_d)},
                     {"alpha_mean", avg(alpha_d)},
                     {"kept_states", trace.states.size()}};
      std::cout << out.dump() << '\n';
      if (!rec_out.empty()) write_json(rec_out, out);
      return 0;
    }

    if (*sweep) {
      manifest.command = "sweep-k2";
      manifest.config = resolved_config(*sweep);
      const auto ks = parse_range(sw_range);
      const SparseDocTermMatrix x = load_matrix(sw_in.input, sw_in.format, sw_in.label_column);
      const LabelVector truth = load_labels(sw_truth);
      if (truth.size() != x.n_docs()) {
        throw DimensionError("truth labels do not match the number of documents");
      }
      std::vector<std::pair<double, double>> rows(ks.size());
      std::mutex log_mutex;
      // Chains run concurrently when there are more threads than chains
      // would need; each chain's result does not depend on the split.
      const unsigned outer = std::min<unsigned>(threads, static_cast<unsigned>(ks.size()));
      const unsigned inner = std::max(1u, threads / std::max(outer, 1u));
      parallel_for(ks.size(), outer, [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
          SamplerConfig cfg = sw_s.cfg;
          cfg.threads = inner;
          const std::string tag = "[k2=" + std::to_string(ks[r]) + "] ";
          const auto trace = run_chain(x, sw_k1, ks[r], cfg, std::nullopt,
                                       progress_printer(sw_s.progress_every, cfg.iterations, tag));
          const LabelVector part = final_partition(x, trace, sw_rule, inner);
          rows[r] = {adjusted_rand_index(part, truth), matched_accuracy(part, truth)};
          std::lock_guard lock(log_mutex);
          std::cerr << tag << "done\n";
        }
      });
      std::ostringstream csv;
      csv << "k2,ari,accuracy\n" << std::setprecision(std::numeric_limits<double>::max_digits10);
      for (std::size_t r = 0; r < ks.size(); ++r) {
        csv << ks[r] << ',' << rows[r].first << ',' << rows[r].second << '\n';
      }
      std::cout << csv.str();
      if (!sw_out.empty()) {
        const fs::path dir = sw_out;
        ensure_dir(dir);
        std::ofstream(dir / "sweep.csv") << csv.str();
        manifest.artifacts = {"sweep.csv"};
        manifest.seed = sw_s.cfg.seed;
        manifest.write(dir);
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

#include "tpca/lab.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "tpca/linop.hpp"
#include "tpca/recovery.hpp"
#include "tpca/sdp.hpp"

namespace tpca {

namespace {

double tau_scale(int n, int k) {
  return std::pow(double(n), double(k) / 4.0) * std::pow(std::log(double(n)), 0.25);
}

ResultRow row_from_recovery(const RecoveryReport& rep, int n, int k, double tau) {
  ResultRow r;
  r.algo = rep.algorithm;
  r.n = n;
  r.k = k;
  r.tau = tau;
  r.seed = rep.seed;
  r.stream = rep.stream;
  r.correlation = rep.correlation;
  r.corr_sq = rep.corr_sq;
  r.matvecs = rep.matvecs;
  r.time_ms = rep.time_ms;
  r.verdict = rep.degenerate ? "degenerate" : (rep.converged ? "" : "nonconv");
  return r;
}

}  // namespace

ExperimentManifest ExperimentManifest::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("manifest: cannot open " + path);
  nlohmann::json j = nlohmann::json::parse(in);
  ExperimentManifest m;
  m.algorithm = j.value("algorithm", m.algorithm);
  m.n_values = j.value("n", std::vector<int>{50});
  m.k = j.value("k", 3);
  m.tau_multipliers = j.value("tau_multipliers", std::vector<double>{1.0});
  m.noise_kinds = j.value("noise_kinds", m.noise_kinds);
  m.trials = j.value("trials", 10);
  m.base_seed = j.value("base_seed", uint64_t(1));
  m.out_prefix = j.value("out_prefix", m.out_prefix);
  return m;
}

std::string ExperimentManifest::to_json() const {
  nlohmann::json j;
  j["algorithm"] = algorithm;
  j["n"] = n_values;
  j["k"] = k;
  j["tau_multipliers"] = tau_multipliers;
  j["noise_kinds"] = noise_kinds;
  j["trials"] = trials;
  j["base_seed"] = base_seed;
  j["out_prefix"] = out_prefix;
  return j.dump(2);
}

SweepResult run_phase_sweep(const ExperimentManifest& m) {
  SweepResult result;
  uint64_t cell_id = 0;
  for (int n : m.n_values)
    for (double mult : m.tau_multipliers)
      for (const std::string& noise : m.noise_kinds) {
        ++cell_id;
        double tau = mult * tau_scale(n, m.k);
        NoiseKind kind = noise_kind_from_string(noise);
        std::vector<double> corr_sqs, matvecs, times;
        for (int trial = 0; trial < m.trials; ++trial) {
          uint64_t stream = derive_stream(m.base_seed, cell_id, uint64_t(trial));
          GenOptions g;
          g.stream = stream;
          SpikedInstance inst;
          try {
            inst = gen_spiked(n, m.k, tau, kind, m.base_seed, g);
          } catch (const std::exception&) {
            continue;  // per-cell failures recorded by omission, run continues
          }
          RecoveryOptions ro;
          ro.power.seed = m.base_seed;
          ro.power.stream = stream;
          RecoveryReport rep;
          try {
            if (m.algorithm == "titi")
              rep = recover_titi(inst, ro);
            else if (m.algorithm == "symmetric")
              rep = recover_symmetric(inst, m.base_seed, ro);
            else if (m.algorithm == "sdp") {
              auto sol = solve_moment_sdp(inst.tensor);
              rep = round_sdp(sol, inst.v0);
              rep.seed = m.base_seed;
              rep.stream = stream;
            } else
              rep = recover_unfold(inst, ro);
          } catch (const std::exception&) {
            continue;
          }
          ResultRow row = row_from_recovery(rep, n, m.k, tau);
          result.rows.push_back(row);
          corr_sqs.push_back(rep.corr_sq);
          matvecs.push_back(double(rep.matvecs));
          times.push_back(rep.time_ms);
        }
        if (corr_sqs.empty()) continue;
        CellSummary cell;
        cell.algo = m.algorithm;
        cell.n = n;
        cell.k = m.k;
        cell.tau = tau;
        cell.noise = noise;
        cell.corr_sq_median = median(corr_sqs);
        cell.corr_sq_q25 = quantile(corr_sqs, 0.25);
        cell.corr_sq_q75 = quantile(corr_sqs, 0.75);
        cell.matvecs_median = median(matvecs);
        cell.time_ms_median = median(times);
        result.cells.push_back(cell);
      }
  return result;
}

void write_sweep(const std::string& prefix, const SweepResult& result) {
  write_csv(prefix + ".csv", result.rows);
  std::ofstream out(prefix + "_cells.csv");
  if (!out) throw std::runtime_error("cannot write " + prefix + "_cells.csv");
  out << "algo,n,k,tau,noise,corr_sq_median,corr_sq_q25,corr_sq_q75,matvecs_median,time_ms_median\n";
  for (const auto& c : result.cells) {
    out << c.algo << ',' << c.n << ',' << c.k << ',' << format_double(c.tau) << ',' << c.noise
        << ',' << format_double(c.corr_sq_median) << ',' << format_double(c.corr_sq_q25) << ','
        << format_double(c.corr_sq_q75) << ',' << format_double(c.matvecs_median) << ','
        << format_double(c.time_ms_median) << "\n";
  }
}

ConcentrationFit run_concentration(const std::string& statistic, const std::vector<int>& n_list,
                                   int reps, uint64_t seed) {
  ConcentrationFit fit;
  fit.statistic = statistic;
  fit.log_corrected = statistic == "titi_centered_norm";
  for (int n : n_list) {
    ConcentrationRecord rec;
    rec.statistic = statistic;
    rec.n = n;
    rec.reps = reps;
    for (int rep = 0; rep < reps; ++rep) {
      uint64_t stream = derive_stream(seed, uint64_t(n), uint64_t(rep));
      double value = 0.0;
      if (statistic == "titi_centered_norm") {
        auto noise = std::make_shared<const DenseTensor>(
            gen_noise(n, 3, NoiseKind::iid_gaussian, seed, stream));
        auto op = op_titi(noise, true);
        PowerOptions po;
        po.seed = seed;
        po.stream = stream;
        po.tol = 1e-6;
        po.max_iter = 56;
        po.restarts = 0;
        value = top_singular_value(op, po).sigma;
      } else if (statistic == "square_opnorm") {
        Rng rng(seed, derive_stream(stream, 1));
        MatrixXd a = rng.gaussian_matrix(n, n);
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(a.transpose() * a, Eigen::EigenvaluesOnly);
        value = std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
      } else if (statistic == "rect_opnorm") {
        auto noise = gen_noise(n, 3, NoiseKind::iid_gaussian, seed, stream);
        ConstMatrixMap f = noise.as_matrix(2);  // n^2 x n
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(f.transpose() * f, Eigen::EigenvaluesOnly);
        value = std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
      } else if (statistic == "gram_deviation") {
        auto noise = gen_noise(n, 3, NoiseKind::iid_gaussian, seed, stream);
        ConstMatrixMap f = noise.as_matrix(2);
        MatrixXd g = f.transpose() * f;
        g -= double(n) * double(n) * MatrixXd::Identity(n, n);
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(g, Eigen::EigenvaluesOnly);
        value = std::max(std::abs(es.eigenvalues().minCoeff()),
                         std::abs(es.eigenvalues().maxCoeff()));
      } else if (statistic == "vA_norm") {
        Rng rng(seed, derive_stream(stream, 2));
        auto noise = gen_noise(n, 3, NoiseKind::iid_gaussian, seed, stream);
        VectorXd v0 = rng.unit_sphere(n);
        MatrixXd acc = MatrixXd::Zero(n, n);
        for (int i = 1; i <= n; ++i) acc += v0[i - 1] * MatrixXd(slice(noise, i));
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(acc.transpose() * acc, Eigen::EigenvaluesOnly);
        value = std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
      } else {
        throw std::invalid_argument("run_concentration: unknown statistic " + statistic);
      }
      rec.norms.push_back(value);
    }
    rec.norm_median = median(rec.norms);
    fit.records.push_back(rec);
  }
  std::vector<double> xs, ys;
  for (const auto& rec : fit.records) {
    xs.push_back(std::log(double(rec.n)));
    double y = rec.norm_median;
    if (fit.log_corrected) y /= std::sqrt(std::log(double(rec.n)));
    ys.push_back(std::log(y));
  }
  fit.fit = fit_line(xs, ys);
  return fit;
}

BenchmarkResult run_benchmark(int n, int trials, uint64_t seed) {
  BenchmarkResult result;
  double tau = 3.0 * std::pow(double(n), 0.75);
  std::vector<double> mv[3], tm[3], cs[3];
  const char* names[3] = {"titi", "unfold_shifted", "unfold_naive"};
  for (int trial = 0; trial < trials; ++trial) {
    uint64_t stream = derive_stream(seed, 0xbe6c4, uint64_t(trial));
    GenOptions g;
    g.stream = stream;
    auto inst = gen_spiked(n, 3, tau, NoiseKind::iid_gaussian, seed, g);
    RecoveryOptions ro;
    ro.power.seed = seed;
    ro.power.stream = stream;
    ro.power.tol = 1e-6;

    RecoveryReport reps[3];
    reps[0] = recover_titi(inst, ro);
    reps[1] = recover_unfold(inst, ro);
    {
      // naive power method: same stopping rule, no spectral shift
      auto op = op_gram(inst.tensor);
      PowerOptions po = ro.power;
      po.max_iter = 400;
      po.restarts = 0;
      auto t0 = std::chrono::steady_clock::now();
      auto er = top_singular_shifted(op, 0.0, po);
      RecoveryReport rep;
      rep.algorithm = "unfold_naive";
      rep.seed = seed;
      rep.stream = stream;
      rep.converged = er.converged;
      rep.iterations = er.iterations;
      rep.matvecs = er.matvecs;
      VectorXd v = er.vector;
      if (eval_poly(inst.tensor, v) < 0) v = -v;
      rep.v = v;
      rep.correlation = v.dot(inst.v0);
      rep.corr_sq = rep.correlation * rep.correlation;
      rep.time_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      reps[2] = rep;
    }
    for (int a = 0; a < 3; ++a) {
      ResultRow row = row_from_recovery(reps[a], n, 3, tau);
      row.algo = names[a];
      result.rows.push_back(row);
      mv[a].push_back(double(reps[a].matvecs));
      tm[a].push_back(reps[a].time_ms);
      cs[a].push_back(reps[a].corr_sq);
    }
  }
  for (int a = 0; a < 3; ++a) {
    CellSummary cell;
    cell.algo = names[a];
    cell.n = n;
    cell.k = 3;
    cell.tau = tau;
    cell.noise = "iid_gaussian";
    cell.corr_sq_median = median(cs[a]);
    cell.corr_sq_q25 = quantile(cs[a], 0.25);
    cell.corr_sq_q75 = quantile(cs[a], 0.75);
    cell.matvecs_median = median(mv[a]);
    cell.time_ms_median = median(tm[a]);
    result.summary.push_back(cell);
  }
  return result;
}

void write_benchmark(const std::string& prefix, const BenchmarkResult& result, int n) {
  write_csv(prefix + ".csv", result.rows);
  std::vector<double> x = {1, 2, 3};
  PlotSeries mv_series{"matvecs (median)", {}, {}};
  PlotSeries tm_series{"time_ms (median)", {}, {}};
  for (const auto& c : result.summary) {
    mv_series.y.push_back(c.matvecs_median);
    mv_series.yerr.push_back(0.0);
    tm_series.y.push_back(c.time_ms_median);
    tm_series.yerr.push_back(0.0);
  }
  // error bars from interquartile corr spread are uninformative here; use the
  // per-trial spread of matvec counts instead
  {
    std::vector<std::vector<double>> per_algo(3);
    for (const auto& r : result.rows) {
      int a = r.algo == "titi" ? 0 : (r.algo == "unfold_shifted" ? 1 : 2);
      per_algo[size_t(a)].push_back(double(r.matvecs));
    }
    for (int a = 0; a < 3; ++a)
      if (!per_algo[size_t(a)].empty())
        mv_series.yerr[size_t(a)] = 0.5 * (quantile(per_algo[size_t(a)], 0.75) -
                                           quantile(per_algo[size_t(a)], 0.25));
  }
  write_svg_plot(prefix + ".svg",
                 "recovery cost at n=" + std::to_string(n) + " (1=titi, 2=shifted, 3=naive)",
                 "algorithm", "count / ms", x, {mv_series, tm_series}, false);
}

Calibration calibrate_thresholds(const std::vector<int>& titi_n, int titi_reps,
                                 const std::vector<int>& sdp_n, int sdp_reps, uint64_t seed) {
  Calibration cal;
  for (int n : titi_n) {
    std::vector<double> vals;
    for (int rep = 0; rep < titi_reps; ++rep) {
      uint64_t stream = derive_stream(seed, 0xca11, uint64_t(n), uint64_t(rep));
      auto noise = std::make_shared<const DenseTensor>(
          gen_noise(n, 3, NoiseKind::iid_gaussian, seed, stream));
      auto op = op_titi(noise, true);
      PowerOptions po;
      po.seed = seed;
      po.stream = stream;
      po.tol = 1e-6;
      po.max_iter = 64;
      po.restarts = 0;
      vals.push_back(top_singular_value(op, po).sigma);
    }
    cal.titi_noise_q99[n] = quantile(vals, 0.99);
  }
  for (int n : sdp_n) {
    std::vector<double> vals;
    for (int rep = 0; rep < sdp_reps; ++rep) {
      uint64_t stream = derive_stream(seed, 0xca12, uint64_t(n), uint64_t(rep));
      auto noise = gen_noise(n, 3, NoiseKind::iid_gaussian, seed, stream);
      vals.push_back(solve_moment_sdp(noise).objective);
    }
    cal.sdp_noise_q99[n] = quantile(vals, 0.99);
  }
  return cal;
}

}  // namespace tpca

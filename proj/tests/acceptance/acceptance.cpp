// Runs the acceptance criteria and prints one PASS/FAIL line per criterion.
// Exit status is nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gsbm/advantage_bounds.hpp"
#include "gsbm/channel_model.hpp"
#include "gsbm/cli.hpp"
#include "gsbm/concentration.hpp"
#include "gsbm/exact_oracle.hpp"
#include "gsbm/numeric.hpp"
#include "gsbm/tensor_core.hpp"

using namespace gsbm;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double sbm_norm(double a, double b, int n) {
  return injective_norm(characteristic_tensor(build_sbm(symmetric_sbm_matrix(2, a, b), n))).value;
}

Outcome closed_form_tensors() {
  const auto t0 = Clock::now();
  const double a = 3, b = 1;
  double err_stated = 0, err_corrected = 0;
  for (int n : {50, 100, 500}) {
    const double norm = sbm_norm(a, b, n);
    const double stated = ((a - b) * (a - b) / (4 * (a + b)) + 1 / (n - (a + b) / 2)) * 4 / n;
    const double corrected = ((a - b) * (a - b) / (4 * (a + b)) + (a - b) * (a - b) / (8 * (n - (a + b) / 2))) * 4 / n;
    err_stated = std::max(err_stated, std::abs(norm - stated));
    err_corrected = std::max(err_corrected, std::abs(norm - corrected));
  }
  double err_toh = 0;
  for (const auto& G : {FiniteGroup::cyclic(2), FiniteGroup::cyclic(3), FiniteGroup::cyclic(4), FiniteGroup::cyclic(5),
                        FiniteGroup::symmetric3()}) {
    for (double eta : {0.1, 0.3}) {
      const double k = G.order();
      std::vector<ToHMode> modes = {ToHMode::sync};
      if (G.abelian()) modes.push_back(ToHMode::sumset);
      for (ToHMode mode : modes) {
        const double got = injective_norm(characteristic_tensor(build_truth_or_haar(G, eta, mode))).value;
        err_toh = std::max(err_toh, std::abs(got - k * k * eta * eta / 2));
      }
    }
  }
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << "2-SBM max |norm - stated form| = " << err_stated << " (corrected form: " << err_corrected
    << "); truth-or-Haar max err = " << err_toh << "; " << secs << " s";
  return {err_stated <= 1e-12 && err_toh <= 1e-12 && secs < 1.0, d.str()};
}

Outcome marginal_orders() {
  const auto t0 = Clock::now();
  bool ok = true;
  std::ostringstream d;
  d << "xor p*:";
  for (int p = 2; p <= 4; ++p) {
    const MarginalProfile prof = marginal_profile(build_xor_sat(p, 0.3));
    const int got = prof.marginal_order.value_or(-1);
    d << ' ' << got;
    ok = ok && got == p;
  }
  const int p = 3, n = 30;
  double worst = 0;
  for (auto [a, b] : {std::pair{5.0, 2.0}, std::pair{1.0, 4.0}}) {
    const MarginalProfile prof = marginal_profile(build_hsbm(symmetric_hsbm_tensor(p, 2, a, b), n));
    ok = ok && prof.marginal_order.value_or(-1) == 2;
    const double m = std::pow(2.0, p - 1) * static_cast<double>(binomial(n, p - 1));
    const double s = a + (std::pow(2.0, p - 1) - 1) * b;
    const double closed = 4.0 / factorial(p) * (m / s + 1 / (1 - s / m)) * std::pow((a - b) / m, 2);
    worst = std::max(worst, std::abs(prof.norm(2) - closed));
  }
  const double secs = seconds_since(t0);
  d << "; hsbm p* = 2, max |norm(T^(2)) - closed form| = " << worst << "; " << secs << " s";
  return {ok && worst <= 1e-12 && secs < 5.0, d.str()};
}

Outcome ks_reductions() {
  const auto t0 = Clock::now();
  int agree = 0, total = 0;
  const std::vector<std::pair<double, double>> ab = {{3, 1}, {6, 0}, {10, 1}, {2, 5}, {4, 3}};
  for (int k : {2, 3, 4, 5}) {
    for (auto [a, b] : ab) {
      const double val = (a - b) * (a - b) / (k * (a + (k - 1) * b)) - 1;
      agree += ks_threshold_sbm(symmetric_sbm_matrix(k, a, b)).satisfied == (val < 0);
      ++total;
    }
  }
  const std::vector<std::pair<double, double>> hab = {{3, 1}, {8, 1}, {9, 2}, {1, 6}, {20, 1}};
  for (int p : {2, 3}) {
    for (int k : {2, 3}) {
      for (auto [a, b] : hab) {
        const double kp = std::pow(double(k), p - 1);
        const double val = (p - 1) * (a - b) * (a - b) / (kp * (a + (kp - 1) * b)) - 1;
        agree += ks_threshold_hsbm(symmetric_hsbm_tensor(p, k, a, b)).satisfied == (val < 0);
        ++total;
      }
    }
  }
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << agree << "/" << total << " verdicts agree with the closed forms; " << secs << " s";
  return {agree == total && secs < 5.0, d.str()};
}

Outcome inequality_chain() {
  const auto t0 = Clock::now();
  const ChannelFamily sbm = build_sbm(symmetric_sbm_matrix(2, 3, 1), 4);
  const std::vector<std::pair<std::string, ChannelFamily>> suite = {
      {"sbm", sbm},
      {"xor", build_xor_sat(2, 0.4)},
      {"sync-Z2", build_truth_or_haar(FiniteGroup::cyclic(2), 0.5, ToHMode::sync)},
      {"censored-sbm", censor(sbm, 0.3)}};
  bool ok = true;
  double min_slack = INFINITY, max_eq = 0;
  std::string first_failure;
  for (const auto& [name, fam] : suite) {
    const TinyInstance inst(fam, 4);
    for (int D = 1; D <= 4; ++D) {
      ChainOptions opts;
      opts.throw_on_failure = false;
      const ChainReport r = verify_chain(inst, D, opts);
      for (const auto& link : r.links) {
        if (link.name.find("==") != std::string::npos) continue;
        min_slack = std::min(min_slack, link.slack);
      }
      const double eq = std::abs(r.exp_R_prime - r.bound_exact);
      max_eq = std::max(max_eq, eq);
      if (!r.passed && first_failure.empty()) first_failure = name + " D=" + std::to_string(D) + ": " + r.violated;
      ok = ok && r.passed && eq <= 1e-10;
    }
  }
  ok = ok && min_slack >= -1e-9;
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << "min inequality slack " << min_slack << ", max |(iii) - (iv)| " << max_eq << "; " << secs << " s";
  if (!first_failure.empty()) d << "; first failure " << first_failure;
  return {ok && secs < 120.0, d.str()};
}

ChannelFamily random_family(std::mt19937_64& gen, int k, int ell) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  Eigen::MatrixXd table(k * k, ell);
  for (Index r = 0; r < table.rows(); ++r) {
    for (int c = 0; c < ell; ++c) table(r, c) = u(gen);
    table.row(r) /= table.row(r).sum();
  }
  return ChannelFamily(2, k, table);
}

Outcome channel_calculus() {
  std::mt19937_64 gen(2024);
  double worst = 0;
  for (int i = 0; i < 10; ++i) {
    const int k = 2 + static_cast<int>(gen() % 2);
    const int ell = 2 + static_cast<int>(gen() % 2);
    const ChannelFamily fam = random_family(gen, k, ell);
    const Eigen::VectorXd T = characteristic_tensor(fam).entries();
    for (double eta : {0.2, 0.7}) {
      const Eigen::VectorXd R = characteristic_tensor(resample(fam, eta)).entries();
      const Eigen::VectorXd C = characteristic_tensor(censor(fam, eta)).entries();
      worst = std::max(worst, (R - (1 - eta) * (1 - eta) * T).cwiseAbs().maxCoeff());
      worst = std::max(worst, (C - (1 - eta) * T).cwiseAbs().maxCoeff());
    }
  }
  std::ostringstream d;
  d << "10 random families, max entrywise deviation " << worst;
  return {worst <= 1e-12, d.str()};
}

Outcome concentration_suite() {
  const auto t0 = Clock::now();
  bool ok = true;
  double worst_mean = 0;
  int moment_checks = 0, moment_failures = 0, tail_failures = 0;
  bool sup_ok = true;
  for (int n : {20, 50}) {
    for (int d : {2, 4}) {
      const PearsonSpec spec{n, d};
      const auto m = pearson_moments_exact(spec, 5);
      worst_mean = std::max(worst_mean, std::abs(m[1] - (d - 1)));
      for (int r = 1; r <= 5; ++r) {
        for (double delta : {0.05, 0.25, 0.5, 0.75, 0.95}) {
          for (double eps : {0.05, 0.25, 0.5, 0.75, 0.95}) {
            ++moment_checks;
            moment_failures += m[r] > pearson_moment_bound(spec, r, delta, eps);
          }
        }
      }
      std::vector<double> grid;
      for (int i = 0; i <= 60; ++i) grid.push_back(0.25 * d * i);
      for (double eps : {0.1, 0.5, 0.9}) {
        double max_sample = 0;
        for (const auto& row : pearson_tail_table(spec, eps, grid, 1000000, 17, &max_sample)) {
          tail_failures += row.empirical > row.bound;
        }
        sup_ok = sup_ok && max_sample <= double(d) * n;
      }
    }
  }
  ok = worst_mean <= 1e-10 && moment_failures == 0 && tail_failures == 0 && sup_ok;
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << "mean err " << worst_mean << ", moment violations " << moment_failures << "/" << moment_checks
    << ", tail violations " << tail_failures << ", sup bound " << (sup_ok ? "held" : "violated") << "; " << secs << " s";
  return {ok && secs < 180.0, d.str()};
}

Outcome sharp_threshold() {
  const auto t0 = Clock::now();
  const int n = 400, D = 10;
  const auto value = [&](double gamma) {
    const ChannelFamily fam = build_truth_or_haar(FiniteGroup::cyclic(3), gamma / std::sqrt(double(n)), ToHMode::sync);
    return bound_mc(fam, n, D, 100000, 0);
  };
  const BoundReport lo = value(0.8);
  const BoundReport hi = value(1.3);
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << "gamma=0.8: " << lo.value << " +- " << *lo.mc_stderr << " (need < 10); gamma=1.3: " << hi.value << " +- "
    << *hi.mc_stderr << " (need > 1000); " << secs << " s";
  return {lo.value < 10 && hi.value > 1000 && secs < 120.0, d.str()};
}

Outcome multifreq_series() {
  bool ok = multifreq_advantage(3, 0.0, 15, 4).value == 1.0 && multifreq_advantage(2, 0.0, 20, 5).value == 1.0;
  std::ostringstream d;
  struct Case {
    int k, n, D;
    double lambda;
  };
  for (const Case c : {Case{2, 20, 5, 0.5}, Case{3, 15, 4, 0.7}}) {
    const MultifreqResult ex = multifreq_advantage(c.k, c.lambda, c.n, c.D);
    MultifreqOptions mc;
    mc.force_mc = true;
    mc.samples = 1000000;
    mc.seed = 1;
    const MultifreqResult est = multifreq_advantage(c.k, c.lambda, c.n, c.D, mc);
    const double z = std::abs(ex.value - est.value) / *est.mc_stderr;
    ok = ok && ex.enumerated && z <= 3.0;
    d << "(k=" << c.k << ",n=" << c.n << ",D=" << c.D << ",lambda=" << c.lambda << ") exact " << ex.value << " mc "
      << est.value << " (" << z << " stderr); ";
  }
  d << "lambda=0 gives 1";
  return {ok, d.str()};
}

std::string run_cli(const std::vector<std::string>& args, int& code) {
  std::vector<const char*> argv = {"gsbm_lab"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return out.str();
}

Outcome determinism() {
  const std::vector<std::vector<std::string>> commands = {
      {"bound", "--model", "toh_sync:group=Z3,gamma=0.8", "--n", "400", "--D", "10", "--samples", "20000", "--seed",
       "7", "--method", "mc"},
      {"bound", "--model", "sbm:alpha=3,beta=1", "--n", "20", "--D", "4", "--seed", "7"},
      {"sample", "--model", "sbm:alpha=3,beta=1", "--n", "60", "--seed", "7"},
      {"sample", "--model", "xor:p=3,eta=0.4", "--n", "12", "--seed", "9", "--null"}};
  bool ok = true;
  int identical = 0;
  for (const auto& args : commands) {
    int c1 = 0, c2 = 0;
    const std::string a = run_cli(args, c1);
    const std::string b = run_cli(args, c2);
    const bool same = c1 == 0 && c2 == 0 &&
                      cli::without_timestamp(nlohmann::json::parse(a)).dump() ==
                          cli::without_timestamp(nlohmann::json::parse(b)).dump();
    identical += same;
    ok = ok && same;
  }
  std::ostringstream d;
  d << identical << "/" << commands.size() << " commands byte-identical across two runs";
  return {ok, d.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"AC1 closed-form characteristic tensors", closed_form_tensors},
      {"AC2 marginal orders", marginal_orders},
      {"AC3 Kesten-Stigum reductions", ks_reductions},
      {"AC4 inequality chain", inequality_chain},
      {"AC5 channel calculus", channel_calculus},
      {"AC6 concentration suite", concentration_suite},
      {"AC7 sharp-threshold phenomenology", sharp_threshold},
      {"AC8 multi-frequency series", multifreq_series},
      {"AC9 determinism", determinism}};
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}

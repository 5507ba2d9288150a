#include "loadlens/welch.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "loadlens/errors.hpp"
#include "loadlens/parallel.hpp"
#include "loadlens/rng.hpp"

namespace loadlens {

SampleSummary SampleSummary::from(std::span<const double> values) {
  SampleSummary s;
  s.n = static_cast<std::int64_t>(values.size());
  if (s.n == 0) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(s.n);
  if (s.n >= 2) {
    double ss = 0.0;
    for (double v : values) {
      double d = v - s.mean;
      ss += d * d;
    }
    s.s2 = ss / static_cast<double>(s.n - 1);
  }
  return s;
}

namespace {

double incomplete_beta_cf(double a, double b, double x) {
  // Modified Lentz continued fraction for I_x(a,b).
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-16;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 500; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw DomainError("regularized_incomplete_beta: a and b must be positive");
  }
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) -
                          std::lgamma(b) + a * std::log(x) +
                          b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * incomplete_beta_cf(a, b, x) / a;
  }
  return 1.0 - front * incomplete_beta_cf(b, a, 1.0 - x) / b;
}

double student_t_p(double t, double dof) {
  if (!std::isfinite(t)) {
    throw DomainError("student_t_p: t must be finite");
  }
  if (!(dof > 0.0)) {
    throw DomainError("student_t_p: dof must be positive");
  }
  if (t == 0.0) return 1.0;
  const double x = dof / (dof + t * t);
  double p = regularized_incomplete_beta(dof / 2.0, 0.5, x);
  return std::clamp(p, 0.0, 1.0);
}

WelchOutcome welch_t(const SampleSummary& a, const SampleSummary& b,
                     double alpha) {
  if (a.n < 2 || b.n < 2) {
    throw DomainError("welch_t: both samples need n >= 2");
  }
  const double se_a = a.s2 / static_cast<double>(a.n);
  const double se_b = b.s2 / static_cast<double>(b.n);
  const double se2 = se_a + se_b;
  if (!(se2 > 0.0)) {
    throw DomainError("welch_t: pooled standard error is zero");
  }
  WelchOutcome out;
  out.t = (a.mean - b.mean) / std::sqrt(se2);
  out.dof = se2 * se2 /
            (se_a * se_a / static_cast<double>(a.n - 1) +
             se_b * se_b / static_cast<double>(b.n - 1));
  out.p_two_sided = student_t_p(out.t, out.dof);
  out.reject = out.p_two_sided < alpha;
  return out;
}

std::vector<double> pooled_peak_observations(
    std::span<const CleanProfile* const> group, const PeakCalendar& calendar) {
  std::vector<double> out;
  out.reserve(group.size() * calendar.hours.size() / 2);
  for (const CleanProfile* p : group) {
    for (std::int32_t h : calendar.hours) {
      std::int32_t v = p->values_milli[static_cast<std::size_t>(h)];
      if (v >= 0) out.push_back(kwh_from_milli(v));
    }
  }
  return out;
}

std::vector<double> household_mean_observations(
    std::span<const CleanProfile* const> group, const PeakCalendar& calendar) {
  std::vector<double> out;
  out.reserve(group.size());
  for (const CleanProfile* p : group) {
    std::int64_t sum = 0;
    std::int64_t n = 0;
    for (std::int32_t h : calendar.hours) {
      std::int32_t v = p->values_milli[static_cast<std::size_t>(h)];
      if (v >= 0) {
        sum += v;
        ++n;
      }
    }
    if (n > 0) {
      out.push_back(static_cast<double>(sum) /
                    (1000.0 * static_cast<double>(n)));
    }
  }
  return out;
}

ResamplingReport resampling_protocol(std::span<const double> obs_a,
                                     std::span<const double> obs_b,
                                     std::int64_t n_a, std::int64_t n_b,
                                     const ResamplingSpec& spec) {
  if (spec.repetitions < 1) {
    throw DomainError("resampling_protocol: repetitions must be >= 1");
  }
  if (obs_a.empty() || obs_b.empty()) {
    throw DomainError("resampling_protocol: observation pools must be nonempty");
  }
  if (n_a < 2 || n_b < 2) {
    throw DomainError("resampling_protocol: group counts must be >= 2");
  }

  struct RepResult {
    double mean_a, mean_b, var_a, var_b;
    bool accepted;
  };
  std::vector<RepResult> reps(static_cast<std::size_t>(spec.repetitions));

  auto run_rep = [&](std::size_t r) {
    Rng rng(spec.seed, static_cast<std::uint64_t>(r));
    auto draw = [&rng](std::span<const double> pool, std::int64_t n,
                       std::vector<double>& buf) {
      buf.clear();
      buf.reserve(static_cast<std::size_t>(n));
      for (std::int64_t i = 0; i < n; ++i) {
        buf.push_back(pool[rng.below(pool.size())]);
      }
    };
    std::vector<double> buf;
    draw(obs_a, n_a, buf);
    SampleSummary sa = SampleSummary::from(buf);
    draw(obs_b, n_b, buf);
    SampleSummary sb = SampleSummary::from(buf);
    WelchOutcome w = welch_t(sa, sb, spec.alpha);
    reps[r] = RepResult{sa.mean, sb.mean, sa.s2, sb.s2, !w.reject};
  };

  parallel_shards(reps.size(), spec.workers,
                  [&](std::size_t, std::size_t begin, std::size_t end) {
                    for (std::size_t r = begin; r < end; ++r) run_rep(r);
                  });

  ResamplingReport report;
  report.repetitions = spec.repetitions;
  report.seed = spec.seed;
  std::int64_t accepted = 0;
  for (const RepResult& r : reps) {
    report.avg_mean_a += r.mean_a;
    report.avg_mean_b += r.mean_b;
    report.avg_var_a += r.var_a;
    report.avg_var_b += r.var_b;
    if (r.accepted) ++accepted;
  }
  const double n = static_cast<double>(spec.repetitions);
  report.avg_mean_a /= n;
  report.avg_mean_b /= n;
  report.avg_var_a /= n;
  report.avg_var_b /= n;
  report.acceptance_rate = static_cast<double>(accepted) / n;
  return report;
}

void write_resampling_csv(std::ostream& out,
                          std::span<const ResamplingRow> rows) {
  out << "pair,level,avg_mean_a,avg_mean_b,avg_var_a,avg_var_b,"
         "acceptance_rate,seed\n";
  char buf[160];
  for (const ResamplingRow& r : rows) {
    std::snprintf(buf, sizeof(buf), ",%.6f,%.6f,%.6f,%.6f,%.4f,", r.avg_mean_a,
                  r.avg_mean_b, r.avg_var_a, r.avg_var_b, r.acceptance_rate);
    out << r.pair << ',' << r.level << buf << r.seed << '\n';
  }
}

}  // namespace loadlens

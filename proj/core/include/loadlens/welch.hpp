#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "loadlens/ingest.hpp"
#include "loadlens/peaks.hpp"

namespace loadlens {

/// Moment summary of one drawn sample; s2 is the sample variance
/// (divide by n-1), the standard-error form the test statistic needs.
struct SampleSummary {
  std::int64_t n = 0;
  double mean = 0.0;
  double s2 = 0.0;

  static SampleSummary from(std::span<const double> values);
};

struct WelchOutcome {
  double t = 0.0;
  double dof = 0.0;
  double p_two_sided = 1.0;
  bool reject = false;
};

/// Unequal-variance two-sample t-test:
///   t = (mean_a - mean_b) / sqrt(s2_a/n_a + s2_b/n_b)
/// with Welch-Satterthwaite degrees of freedom and a two-sided p-value.
/// Throws DomainError when the pooled standard error is zero or n < 2.
WelchOutcome welch_t(const SampleSummary& a, const SampleSummary& b,
                     double alpha);

/// Two-sided Student-t tail probability via the regularized incomplete beta
/// function: p = I_{dof/(dof+t^2)}(dof/2, 1/2), absolute error <= 1e-10.
/// t = 0 returns exactly 1.
double student_t_p(double t, double dof);

/// Continued-fraction evaluation of I_x(a, b); exposed so the numeric kernel
/// can be validated directly.
double regularized_incomplete_beta(double a, double b, double x);

/// How observation pools are drawn from profile groups.
enum class SampleMode { PooledObservations, HouseholdMeans };

/// All (household, peak-hour) values with a present reading, in kWh.
std::vector<double> pooled_peak_observations(
    std::span<const CleanProfile* const> group, const PeakCalendar& calendar);

/// One value per household: its mean over present peak hours. Households
/// with no present peak observation are skipped.
std::vector<double> household_mean_observations(
    std::span<const CleanProfile* const> group, const PeakCalendar& calendar);

struct ResamplingSpec {
  int repetitions = 50;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  int workers = 1;
};

struct ResamplingReport {
  int repetitions = 0;
  double avg_mean_a = 0.0;
  double avg_mean_b = 0.0;
  double avg_var_a = 0.0;
  double avg_var_b = 0.0;
  double acceptance_rate = 0.0;  // fraction of repetitions not rejecting
  std::uint64_t seed = 0;
};

/// Repeated random-pick protocol: per repetition, draw n_a and n_b values
/// uniformly with replacement from the two pools, summarize, run the test.
/// Reports the averaged repetition means/variances and the acceptance rate.
/// Each repetition derives its substream from (seed, repetition index), so
/// results are identical for any worker count.
ResamplingReport resampling_protocol(std::span<const double> obs_a,
                                     std::span<const double> obs_b,
                                     std::int64_t n_a, std::int64_t n_b,
                                     const ResamplingSpec& spec);

/// One line of the resampling report CSV: a (group pair, peak level) cell.
struct ResamplingRow {
  std::string pair;
  std::string level;
  double avg_mean_a = 0.0;
  double avg_mean_b = 0.0;
  double avg_var_a = 0.0;
  double avg_var_b = 0.0;
  double acceptance_rate = 0.0;
  std::uint64_t seed = 0;
};

/// `pair,level,avg_mean_a,avg_mean_b,avg_var_a,avg_var_b,acceptance_rate,seed`
void write_resampling_csv(std::ostream& out,
                          std::span<const ResamplingRow> rows);

}  // namespace loadlens

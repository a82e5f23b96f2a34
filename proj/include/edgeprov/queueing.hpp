#pragma once

#include <span>
#include <vector>

#include "edgeprov/errors.hpp"

namespace edgeprov {

/// Request backlog of a node with its per-slot arrival history.
struct QueueState {
  double q = 0.0;
  std::vector<double> history{0.0};  // history[0] is the initial state
  long slot = 0;

  void step(double arrivals, double services);
};

/// One virtual queue per device, enforcing the average-penalty constraint.
struct VirtualQueueState {
  std::vector<double> z;
  long slot = 0;

  explicit VirtualQueueState(std::size_t devices = 0) : z(devices, 0.0) {}

  void step(std::span<const double> penalties);
};

/// Penalty bookkeeping knobs: per-device average budget and the tradeoff
/// weight.
struct PenaltyConfig {
  std::vector<double> p_avg;
  double v = 0.0;

  void validate() const;
};

/// What one slot produced: arrivals, service completions and penalties.
struct SlotOutcome {
  double arrivals = 0.0;
  double services = 0.0;
  double y0 = 0.0;
  std::vector<double> device_penalties;
};

/// max(q - services + arrivals, 0)
double queue_step(double q, double arrivals, double services);

/// max(z + penalty, 0)
double virtual_queue_step(double z, double penalty);

/// p - p_avg; may be negative.
double penalty(double p, double p_avg);

/// 0.5 * (sum of squared queue sizes + sum of squared virtual queue sizes)
double lyapunov(std::span<const double> qs, std::span<const double> zs);

/// The drift-plus-penalty objective:
///   v * y0 + sum_i qs[i] * (arrivals[i] - services[i]) + sum_k zs[k] * ys[k]
double dpp_objective(double v, double y0, std::span<const double> qs,
                     std::span<const double> arrivals, std::span<const double> services,
                     std::span<const double> zs, std::span<const double> ys);

/// Arithmetic mean of the series. The series must be non-empty.
double time_average(std::span<const double> series);

/// Fraction of entries strictly above the bound.
double tail_violation_rate(std::span<const double> backlog, double bound);

/// True when the virtual queue grows sublinearly: the mean of the last
/// quartile of the series divided by the series length is at most epsilon.
bool stability_check(std::span<const double> z_series, double epsilon = 1e-3);

}  // namespace edgeprov

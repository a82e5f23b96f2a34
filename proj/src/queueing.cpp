#include "edgeprov/queueing.hpp"

#include <algorithm>
#include <cmath>

namespace edgeprov {

void QueueState::step(double arrivals, double services) {
  q = queue_step(q, arrivals, services);
  history.push_back(arrivals);
  ++slot;
}

void VirtualQueueState::step(std::span<const double> penalties) {
  if (penalties.size() != z.size()) {
    throw DomainError("penalty vector size does not match virtual queue count");
  }
  for (std::size_t k = 0; k < z.size(); ++k) z[k] = virtual_queue_step(z[k], penalties[k]);
  ++slot;
}

void PenaltyConfig::validate() const {
  if (v < 0.0) throw DomainError("tradeoff weight V must be non-negative");
  for (double p : p_avg) {
    if (p < 0.0) throw DomainError("average penalty budget must be non-negative");
  }
}

double queue_step(double q, double arrivals, double services) {
  if (q < 0.0 || arrivals < 0.0 || services < 0.0) {
    throw DomainError("queue update inputs must be non-negative");
  }
  return std::max(q - services + arrivals, 0.0);
}

double virtual_queue_step(double z, double penalty) {
  if (z < 0.0) throw DomainError("virtual queue must be non-negative");
  return std::max(z + penalty, 0.0);
}

double penalty(double p, double p_avg) {
  if (p < 0.0) throw DomainError("penalty input must be non-negative");
  return p - p_avg;
}

double lyapunov(std::span<const double> qs, std::span<const double> zs) {
  double sum = 0.0;
  for (double q : qs) {
    if (q < 0.0) throw DomainError("queue sizes must be non-negative");
    sum += q * q;
  }
  for (double z : zs) {
    if (z < 0.0) throw DomainError("virtual queue sizes must be non-negative");
    sum += z * z;
  }
  return 0.5 * sum;
}

double dpp_objective(double v, double y0, std::span<const double> qs,
                     std::span<const double> arrivals, std::span<const double> services,
                     std::span<const double> zs, std::span<const double> ys) {
  if (qs.size() != arrivals.size() || qs.size() != services.size()) {
    throw DomainError("queue, arrival and service vectors must have equal size");
  }
  if (zs.size() != ys.size()) {
    throw DomainError("virtual queue and penalty vectors must have equal size");
  }
  double value = v * y0;
  for (std::size_t i = 0; i < qs.size(); ++i) value += qs[i] * (arrivals[i] - services[i]);
  for (std::size_t k = 0; k < zs.size(); ++k) value += zs[k] * ys[k];
  return value;
}

double time_average(std::span<const double> series) {
  if (series.empty()) throw DomainError("time average of an empty series");
  double sum = 0.0;
  for (double v : series) sum += v;
  return sum / static_cast<double>(series.size());
}

double tail_violation_rate(std::span<const double> backlog, double bound) {
  if (bound < 0.0) throw DomainError("tail bound must be non-negative");
  if (backlog.empty()) return 0.0;
  std::size_t violations = 0;
  for (double value : backlog) {
    if (value > bound) ++violations;
  }
  return static_cast<double>(violations) / static_cast<double>(backlog.size());
}

bool stability_check(std::span<const double> z_series, double epsilon) {
  if (z_series.size() < 2) throw DomainError("stability check needs at least two samples");
  if (epsilon < 0.0) throw DomainError("stability epsilon must be non-negative");
  const std::size_t n = z_series.size();
  const std::size_t quartile = std::max<std::size_t>(1, n / 4);
  double sum = 0.0;
  for (std::size_t i = n - quartile; i < n; ++i) sum += z_series[i];
  const double mean = sum / static_cast<double>(quartile);
  return mean / static_cast<double>(n) <= epsilon;
}

}  // namespace edgeprov

#pragma once

#include <map>
#include <string>
#include <vector>

#include "edgeprov/domain.hpp"

namespace edgeprov {

/// How the per-device load fed to the reallocation trigger is measured.
/// `Consumed` compares the occupied share of each resource (the default);
/// `PaperVerbatim` compares the residual instead, keeping the workload
/// formula exactly as written for audits.
enum class LoadSemantics {
  Consumed,
  PaperVerbatim,
};

/// Parameters of the threshold-triggered reallocation policy.
struct LoadParams {
  double rate_norm = 0.8;
  double rate_th = 0.5;
  LoadSemantics semantics = LoadSemantics::Consumed;
  /// Per-device maximum workload override; defaults to the device capacity
  /// of each resource kind.
  std::map<std::string, ResourceVector> l_max;

  void validate() const;
};

/// The workload of a device for one resource kind: capacity minus what its
/// containers consume.
double workload(const EdgeDevice& device, ResourceKind kind);

/// l_max * rate_norm with rate_norm in [0, 1].
double normal_load(double l_max, double rate_norm);

/// rate_th * (1 - rate_norm) * containers * l_max
double threshold(double rate_th, double rate_norm, std::size_t containers, double l_max);

/// The trigger condition: current load strictly above normal plus threshold.
bool should_reallocate(double l_curr, double l_norm, double l_th);

/// Evaluates the trigger for every device and every resource kind; returns
/// the ids of devices where any kind fired. A fired device is due for a
/// fresh resource-representation query.
std::vector<std::string> scan(const EdgeNode& node, const LoadParams& params);

}  // namespace edgeprov

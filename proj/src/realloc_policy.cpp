#include "edgeprov/realloc_policy.hpp"

namespace edgeprov {

void LoadParams::validate() const {
  if (rate_norm < 0.0 || rate_norm > 1.0) throw DomainError("rate_norm must be in [0, 1]");
  if (rate_th < 0.0 || rate_th > 1.0) throw DomainError("rate_th must be in [0, 1]");
  for (const auto& [device, limits] : l_max) {
    for (ResourceKind kind : kResourceKinds) {
      if (!(limits[kind] > 0.0)) {
        throw DomainError("maximum workload for device '" + device + "' must be positive");
      }
    }
  }
}

double workload(const EdgeDevice& device, ResourceKind kind) {
  return residual(device)[kind];
}

double normal_load(double l_max, double rate_norm) {
  if (rate_norm < 0.0 || rate_norm > 1.0) throw DomainError("rate_norm must be in [0, 1]");
  return l_max * rate_norm;
}

double threshold(double rate_th, double rate_norm, std::size_t containers, double l_max) {
  if (rate_th < 0.0 || rate_th > 1.0) throw DomainError("rate_th must be in [0, 1]");
  if (rate_norm < 0.0 || rate_norm > 1.0) throw DomainError("rate_norm must be in [0, 1]");
  return rate_th * (1.0 - rate_norm) * static_cast<double>(containers) * l_max;
}

bool should_reallocate(double l_curr, double l_norm, double l_th) {
  return l_curr > l_norm + l_th;
}

std::vector<std::string> scan(const EdgeNode& node, const LoadParams& params) {
  params.validate();
  std::vector<std::string> fired;
  for (const EdgeDevice& device : node.devices()) {
    const auto override_it = params.l_max.find(device.id());
    const std::size_t containers = device.containers().size();
    bool fires = false;
    for (ResourceKind kind : kResourceKinds) {
      const double l_max = override_it != params.l_max.end()
                               ? override_it->second[kind]
                               : device.capacity()[kind];
      if (!(l_max > 0.0)) continue;
      const double l_norm = normal_load(l_max, params.rate_norm);
      const double l_th = threshold(params.rate_th, params.rate_norm, containers, l_max);
      const double available = workload(device, kind);
      const double l_curr = params.semantics == LoadSemantics::Consumed
                                ? device.capacity()[kind] - available
                                : available;
      if (should_reallocate(l_curr, l_norm, l_th)) {
        fires = true;
        break;
      }
    }
    if (fires) fired.push_back(device.id());
  }
  return fired;
}

}  // namespace edgeprov

#include "edgeprov/delay.hpp"

#include <cmath>
#include <string>

namespace edgeprov {

void ChannelSpec::validate() const {
  if (!(bandwidth_hz > 0.0)) throw DomainError("channel bandwidth must be positive");
  if (!(noise_variance > 0.0)) throw DomainError("noise variance must be positive");
  for (const ChannelUser& user : users) {
    if (user.tx_power < 0.0) throw DomainError("transmit power must be non-negative");
    for (double gain : user.gains) {
      if (gain < 0.0) throw DomainError("channel gain must be non-negative");
    }
  }
}

double local_processing_delay(double data_bytes, double compute_rate) {
  if (!(compute_rate > 0.0)) throw DomainError("compute rate must be positive");
  if (data_bytes < 0.0) throw DomainError("data size must be non-negative");
  return data_bytes / compute_rate;
}

double storage_delay(double data_bytes, int write_index, int read_index,
                     double write_speed, double read_speed) {
  if (write_index != 0 && write_index != 1) throw DomainError("write index must be 0 or 1");
  if (read_index != 0 && read_index != 1) throw DomainError("read index must be 0 or 1");
  if (!(write_speed > 0.0)) throw DomainError("write speed must be positive");
  if (!(read_speed > 0.0)) throw DomainError("read speed must be positive");
  if (data_bytes < 0.0) throw DomainError("data size must be non-negative");
  return data_bytes * (write_index / write_speed + read_index / read_speed);
}

double local_total_delay(double data_bytes, double compute_rate, int write_index,
                         int read_index, double write_speed, double read_speed) {
  return local_processing_delay(data_bytes, compute_rate) +
         storage_delay(data_bytes, write_index, read_index, write_speed, read_speed);
}

namespace {

double received_power(const ChannelSpec& spec, std::size_t user, std::size_t node) {
  if (user >= spec.users.size()) throw DomainError("channel user index out of range");
  const ChannelUser& u = spec.users[user];
  if (node >= u.gains.size()) throw DomainError("channel node index out of range");
  const double gain = u.gains[node];
  return u.tx_power * gain * gain;
}

}  // namespace

double link_rate(const ChannelSpec& spec, std::size_t user, std::size_t node,
                 std::span<const std::size_t> interferers) {
  spec.validate();
  const double own = received_power(spec, user, node);
  double interference = 0.0;
  for (std::size_t other : interferers) {
    if (other == user) continue;
    interference += received_power(spec, other, node);
  }
  const double sinr = own / (spec.noise_variance + interference);
  return spec.bandwidth_hz * std::log2(1.0 + sinr);
}

double transmission_delay(double payload_bits, double rate_bps) {
  if (!(rate_bps > 0.0)) throw DomainError("link rate must be positive");
  if (payload_bits < 0.0) throw DomainError("payload must be non-negative");
  return payload_bits / rate_bps;
}

double edge_total_delay(const DelayBreakdown& parts) {
  if (parts.transmission < 0.0 || parts.storage < 0.0 || parts.processing < 0.0 ||
      parts.waiting < 0.0) {
    throw DomainError("delay components must be non-negative");
  }
  return parts.total();
}

}  // namespace edgeprov

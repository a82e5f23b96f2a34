#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "edgeprov/errors.hpp"

namespace edgeprov {

/// Delay components of a served request, all in seconds.
struct DelayBreakdown {
  double transmission = 0.0;
  double storage = 0.0;
  double processing = 0.0;
  double waiting = 0.0;

  /// Exact component sum.
  double total() const noexcept {
    return transmission + storage + processing + waiting;
  }
};

/// Wireless uplink parameters shared by the users of a node.
struct ChannelUser {
  double tx_power = 0.0;            // watts
  std::vector<double> gains;        // channel gain per node, dimensionless
};

struct ChannelSpec {
  double bandwidth_hz = 1.0;
  double noise_variance = 1e-9;     // watts
  std::vector<ChannelUser> users;

  void validate() const;
};

/// Data size divided by the device compute rate.
double local_processing_delay(double data_bytes, double compute_rate);

/// I/O time for the active read/write legs. Indices must be 0 or 1.
double storage_delay(double data_bytes, int write_index, int read_index,
                     double write_speed, double read_speed);

/// Processing plus storage; local execution has no transmission or queueing.
double local_total_delay(double data_bytes, double compute_rate, int write_index,
                         int read_index, double write_speed, double read_speed);

/// Achievable uplink rate in bits/s for `user` towards `node`, with the given
/// interfering users sharing the medium.
double link_rate(const ChannelSpec& spec, std::size_t user, std::size_t node,
                 std::span<const std::size_t> interferers);

/// Payload size over link rate.
double transmission_delay(double payload_bits, double rate_bps);

/// Sum of the four delay components; each must be non-negative.
double edge_total_delay(const DelayBreakdown& parts);

}  // namespace edgeprov

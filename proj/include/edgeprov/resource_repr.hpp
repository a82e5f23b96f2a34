#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>

#include "edgeprov/domain.hpp"

namespace edgeprov {

// Devices expose their capabilities and current availability to the node
// supervisor as small XML documents. The wire schema is fixed:
//
//   <resources device="..." slot="N">
//     <cpu>
//       <family>...</family>
//       <architecture>...</architecture>
//       <cores>N</cores>
//       <frequency_hz>N</frequency_hz>
//       <usage>F</usage>
//     </cpu>
//     <memory><total_bytes>N</total_bytes><available_bytes>N</available_bytes></memory>
//     <storage>
//       <total_bytes>N</total_bytes><available_bytes>N</available_bytes>
//       <read_bps>N</read_bps><write_bps>N</write_bps>
//     </storage>
//     <network><capacity_bps>N</capacity_bps><available_bps>N</available_bps></network>
//   </resources>
//
// Counts and byte/rate values are integers; `usage` is a fraction with at
// most six fractional digits. Documents are UTF-8 and element order is
// stable. Unknown elements are ignored by the parser.

struct CpuInfo {
  std::string family;
  std::string architecture;
  int cores = 1;
  std::uint64_t frequency_hz = 0;
  double usage = 0.0;  // fraction in [0, 1], quantized to 1e-6

  bool operator==(const CpuInfo&) const = default;
};

struct MemoryInfo {
  std::uint64_t total_bytes = 0;
  std::uint64_t available_bytes = 0;

  bool operator==(const MemoryInfo&) const = default;
};

struct StorageInfo {
  std::uint64_t total_bytes = 0;
  std::uint64_t available_bytes = 0;
  std::uint64_t read_bps = 0;   // bytes/s
  std::uint64_t write_bps = 0;  // bytes/s

  bool operator==(const StorageInfo&) const = default;
};

struct NetworkInfo {
  std::uint64_t capacity_bps = 0;   // bits/s
  std::uint64_t available_bps = 0;  // bits/s

  bool operator==(const NetworkInfo&) const = default;
};

/// A snapshot of one device's static properties and current availability.
struct ResourceDescriptor {
  std::string device;
  long taken_at = 0;
  CpuInfo cpu;
  MemoryInfo memory;
  StorageInfo storage;
  NetworkInfo network;

  /// Semantic checks: available never exceeds total, usage in [0, 1],
  /// at least one core. Throws ValidationError.
  void validate() const;

  bool operator==(const ResourceDescriptor&) const = default;
};

/// Probes the device model: availability reflects current residuals, the
/// rest comes from the device's static properties. Deterministic for a
/// given device state and slot.
ResourceDescriptor snapshot(const EdgeDevice& device, long slot);

/// Serializes to the canonical XML form above.
std::string to_xml(const ResourceDescriptor& descriptor);

/// Parses a descriptor document. Malformed XML raises ParseError with the
/// byte offset of the failure; a missing required element or a semantic
/// violation raises ValidationError. Unknown elements are ignored.
ResourceDescriptor from_xml(std::string_view xml);

/// The supervisor's store of the latest descriptor per tracked device.
/// Readers may run concurrently; writers are exclusive.
class Registry {
public:
  explicit Registry(long max_age_slots = 1);

  void track(const std::string& device_id);
  bool tracked(const std::string& device_id) const;

  /// Takes a fresh snapshot of the device, round-trips it through the XML
  /// codec (every supervisor/device exchange crosses the wire format), and
  /// stores it. Throws DomainError for untracked devices and
  /// InvariantError if the snapshot would move taken_at backwards.
  ResourceDescriptor supervisor_query(const EdgeDevice& device, long slot);

  std::optional<ResourceDescriptor> find(const std::string& device_id) const;

  long max_age_slots() const noexcept { return max_age_slots_; }

private:
  mutable std::shared_mutex mutex_;
  long max_age_slots_;
  std::map<std::string, std::optional<ResourceDescriptor>> entries_;
};

/// Free-function form of the registry query.
inline ResourceDescriptor supervisor_query(Registry& registry, const EdgeDevice& device,
                                           long slot) {
  return registry.supervisor_query(device, slot);
}

}  // namespace edgeprov

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "edgeprov/resources.hpp"

namespace edgeprov {

/// A deployable service: which resource kinds it requires and how much of
/// each it consumes while a container for it runs.
struct Service {
  std::string id;
  std::array<bool, kNumResourceKinds> required{};
  ResourceVector amounts;

  Service() = default;

  /// Requirement indicators derived from the amounts (non-zero => required).
  Service(std::string id_, ResourceVector amounts_);

  /// Explicit indicators; validated against the amounts.
  Service(std::string id_, std::array<bool, kNumResourceKinds> required_,
          ResourceVector amounts_);
};

/// A container instantiated for one subtask of a request. `share` is the
/// fraction of the request assigned to this device; consumption equals the
/// service amounts scaled by that share.
struct Container {
  std::string id;
  std::string service;
  ResourceVector consumption;
  double share = 1.0;
  long created_at = 0;
};

/// One edge device: capacities of the four resource kinds, storage I/O
/// speeds, a data processing rate and the containers currently running.
class EdgeDevice {
public:
  EdgeDevice(std::string id, ResourceVector capacity, double write_speed,
             double read_speed, double compute_rate, int cores = 1,
             std::string cpu_family = "generic",
             std::string cpu_architecture = "x86_64");

  const std::string& id() const noexcept { return id_; }
  const ResourceVector& capacity() const noexcept { return capacity_; }
  double write_speed() const noexcept { return write_speed_; }
  double read_speed() const noexcept { return read_speed_; }
  double compute_rate() const noexcept { return compute_rate_; }
  int cores() const noexcept { return cores_; }
  double frequency_hz() const noexcept { return capacity_.processing() / cores_; }
  const std::string& cpu_family() const noexcept { return cpu_family_; }
  const std::string& cpu_architecture() const noexcept { return cpu_architecture_; }

  const std::vector<Container>& containers() const noexcept { return containers_; }

  ResourceVector consumption_total() const noexcept;

  /// Adds a container, enforcing the capacity constraint and container id
  /// uniqueness. Throws InvariantError when either is violated.
  void add_container(Container container);

  /// Removes and returns the named container. Removing an unknown id is an
  /// InvariantError (double destroy).
  Container remove_container(std::string_view container_id);

  bool has_container(std::string_view container_id) const noexcept;

private:
  std::string id_;
  ResourceVector capacity_;
  double write_speed_ = 0;
  double read_speed_ = 0;
  double compute_rate_ = 0;
  int cores_ = 1;
  std::string cpu_family_;
  std::string cpu_architecture_;
  std::vector<Container> containers_;
};

/// True iff the sum of container consumptions fits within the capacity,
/// component-wise.
bool validate_capacity(const EdgeDevice& device) noexcept;

/// Capacity minus total consumption. Requires validate_capacity(device);
/// throws InvariantError otherwise.
ResourceVector residual(const EdgeDevice& device);

/// A supervised set of edge devices.
class EdgeNode {
public:
  EdgeNode(std::string id, std::vector<EdgeDevice> devices);

  const std::string& id() const noexcept { return id_; }
  std::vector<EdgeDevice>& devices() noexcept { return devices_; }
  const std::vector<EdgeDevice>& devices() const noexcept { return devices_; }

  EdgeDevice& device(std::string_view device_id);
  const EdgeDevice* find(std::string_view device_id) const noexcept;

private:
  std::string id_;
  std::vector<EdgeDevice> devices_;
};

/// Binary user-to-node association; every user maps to exactly one node.
class AssociationMatrix {
public:
  AssociationMatrix() = default;
  AssociationMatrix(std::size_t nodes, std::vector<std::size_t> node_of);

  std::size_t users() const noexcept { return node_of_.size(); }
  std::size_t nodes() const noexcept { return nodes_; }

  int x(std::size_t user, std::size_t node) const;
  std::size_t node_of(std::size_t user) const;

  /// Row sums all equal to exactly one.
  bool is_valid() const noexcept;

private:
  std::size_t nodes_ = 0;
  std::vector<std::size_t> node_of_;
};

/// Deterministic round-robin association by user index. Throws ConfigError
/// when there is no node to associate with.
AssociationMatrix associate(std::size_t users, std::size_t nodes);

/// A unit of work: data to process with a given service before a timeout.
struct Request {
  int user = 0;
  double data_size = 0.0;  // bytes
  std::string service;
  int timeout_slots = 0;
  bool needs_read = false;
  bool needs_write = false;
  long arrival_slot = 0;

  void validate() const;
};

}  // namespace edgeprov

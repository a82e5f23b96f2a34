#include "edgeprov/domain.hpp"

#include <algorithm>
#include <set>
#include <utility>

namespace edgeprov {

Service::Service(std::string id_, ResourceVector amounts_)
    : id(std::move(id_)), amounts(amounts_) {
  for (std::size_t i = 0; i < kNumResourceKinds; ++i) {
    required[i] = amounts[static_cast<ResourceKind>(i)] > 0.0;
  }
}

Service::Service(std::string id_, std::array<bool, kNumResourceKinds> required_,
                 ResourceVector amounts_)
    : id(std::move(id_)), required(required_), amounts(amounts_) {
  for (std::size_t i = 0; i < kNumResourceKinds; ++i) {
    const double amount = amounts[static_cast<ResourceKind>(i)];
    if (amount > 0.0 && !required[i]) {
      throw DomainError("service '" + id + "' has a non-zero amount for " +
                        to_string(static_cast<ResourceKind>(i)) +
                        " but does not mark it required");
    }
    if (!required[i] && amount != 0.0) {
      throw DomainError("service '" + id + "' must have zero amount for " +
                        to_string(static_cast<ResourceKind>(i)));
    }
  }
}

EdgeDevice::EdgeDevice(std::string id, ResourceVector capacity, double write_speed,
                       double read_speed, double compute_rate, int cores,
                       std::string cpu_family, std::string cpu_architecture)
    : id_(std::move(id)),
      capacity_(capacity),
      write_speed_(write_speed),
      read_speed_(read_speed),
      compute_rate_(compute_rate),
      cores_(cores),
      cpu_family_(std::move(cpu_family)),
      cpu_architecture_(std::move(cpu_architecture)) {
  if (id_.empty()) throw DomainError("device id must not be empty");
  if (!(write_speed_ > 0.0)) throw DomainError("device write speed must be positive");
  if (!(read_speed_ > 0.0)) throw DomainError("device read speed must be positive");
  if (!(compute_rate_ > 0.0)) throw DomainError("device compute rate must be positive");
  if (cores_ < 1) throw DomainError("device must have at least one core");
}

ResourceVector EdgeDevice::consumption_total() const noexcept {
  ResourceVector total;
  for (const Container& container : containers_) total += container.consumption;
  return total;
}

void EdgeDevice::add_container(Container container) {
  if (container.share <= 0.0 || container.share > 1.0) {
    throw DomainError("container share must be in (0, 1]");
  }
  if (has_container(container.id)) {
    throw InvariantError("container '" + container.id + "' already exists on device '" +
                         id_ + "'");
  }
  const ResourceVector next = consumption_total() + container.consumption;
  if (!next.fits_within(capacity_)) {
    throw InvariantError("capacity exceeded on device '" + id_ +
                         "' while adding container '" + container.id + "'");
  }
  containers_.push_back(std::move(container));
}

Container EdgeDevice::remove_container(std::string_view container_id) {
  const auto it = std::find_if(containers_.begin(), containers_.end(),
                               [&](const Container& c) { return c.id == container_id; });
  if (it == containers_.end()) {
    throw InvariantError("container '" + std::string(container_id) +
                         "' not found on device '" + id_ + "'");
  }
  Container out = std::move(*it);
  containers_.erase(it);
  return out;
}

bool EdgeDevice::has_container(std::string_view container_id) const noexcept {
  return std::any_of(containers_.begin(), containers_.end(),
                     [&](const Container& c) { return c.id == container_id; });
}

bool validate_capacity(const EdgeDevice& device) noexcept {
  return device.consumption_total().fits_within(device.capacity());
}

ResourceVector residual(const EdgeDevice& device) {
  if (!validate_capacity(device)) {
    throw InvariantError("device '" + device.id() + "' violates its capacity constraint");
  }
  return device.capacity() - device.consumption_total();
}

EdgeNode::EdgeNode(std::string id, std::vector<EdgeDevice> devices)
    : id_(std::move(id)), devices_(std::move(devices)) {
  std::set<std::string> seen;
  for (const EdgeDevice& device : devices_) {
    if (!seen.insert(device.id()).second) {
      throw DomainError("duplicate device id '" + device.id() + "' in node '" + id_ + "'");
    }
  }
}

EdgeDevice& EdgeNode::device(std::string_view device_id) {
  for (EdgeDevice& device : devices_) {
    if (device.id() == device_id) return device;
  }
  throw DomainError("unknown device '" + std::string(device_id) + "' in node '" + id_ + "'");
}

const EdgeDevice* EdgeNode::find(std::string_view device_id) const noexcept {
  for (const EdgeDevice& device : devices_) {
    if (device.id() == device_id) return &device;
  }
  return nullptr;
}

AssociationMatrix::AssociationMatrix(std::size_t nodes, std::vector<std::size_t> node_of)
    : nodes_(nodes), node_of_(std::move(node_of)) {
  for (std::size_t node : node_of_) {
    if (node >= nodes_) throw DomainError("association references a node out of range");
  }
}

int AssociationMatrix::x(std::size_t user, std::size_t node) const {
  if (user >= node_of_.size() || node >= nodes_) {
    throw DomainError("association index out of range");
  }
  return node_of_[user] == node ? 1 : 0;
}

std::size_t AssociationMatrix::node_of(std::size_t user) const {
  if (user >= node_of_.size()) throw DomainError("association user out of range");
  return node_of_[user];
}

bool AssociationMatrix::is_valid() const noexcept {
  for (std::size_t node : node_of_) {
    if (node >= nodes_) return false;
  }
  return true;
}

AssociationMatrix associate(std::size_t users, std::size_t nodes) {
  if (nodes == 0) throw ConfigError("cannot associate users: no edge node available");
  std::vector<std::size_t> node_of(users);
  for (std::size_t user = 0; user < users; ++user) node_of[user] = user % nodes;
  return AssociationMatrix(nodes, std::move(node_of));
}

void Request::validate() const {
  if (!(data_size > 0.0)) throw DomainError("request data size must be positive");
  if (timeout_slots <= 0) throw DomainError("request timeout must be positive");
  if (service.empty()) throw DomainError("request must name a service");
}

}  // namespace edgeprov

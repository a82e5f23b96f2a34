#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>

#include "edgeprov/errors.hpp"

namespace edgeprov {

/// The four resource kinds of an edge device. Iteration order is fixed:
/// processing, storage, memory, networking.
///
/// Units used throughout the library: processing in cycles/s, storage and
/// memory in bytes, networking in bits/s.
enum class ResourceKind : int {
  Processing = 0,
  Storage = 1,
  Memory = 2,
  Networking = 3,
};

inline constexpr std::size_t kNumResourceKinds = 4;

inline constexpr std::array<ResourceKind, kNumResourceKinds> kResourceKinds = {
    ResourceKind::Processing,
    ResourceKind::Storage,
    ResourceKind::Memory,
    ResourceKind::Networking,
};

inline const char* to_string(ResourceKind kind) {
  switch (kind) {
    case ResourceKind::Processing: return "processing";
    case ResourceKind::Storage: return "storage";
    case ResourceKind::Memory: return "memory";
    case ResourceKind::Networking: return "networking";
  }
  return "unknown";
}

/// Non-negative amounts of the four resource kinds. Used for device
/// capacities, container consumption and residual availability.
class ResourceVector {
public:
  ResourceVector() = default;

  ResourceVector(double processing, double storage, double memory,
                 double networking)
      : values_{processing, storage, memory, networking} {
    for (std::size_t i = 0; i < kNumResourceKinds; ++i) {
      if (!(values_[i] >= 0.0) || !std::isfinite(values_[i])) {
        throw DomainError(std::string("resource amount for ") +
                          to_string(static_cast<ResourceKind>(i)) +
                          " must be finite and non-negative");
      }
    }
  }

  static ResourceVector uniform(double value) {
    return ResourceVector(value, value, value, value);
  }

  double operator[](ResourceKind kind) const noexcept {
    return values_[static_cast<std::size_t>(kind)];
  }

  double processing() const noexcept { return values_[0]; }
  double storage() const noexcept { return values_[1]; }
  double memory() const noexcept { return values_[2]; }
  double networking() const noexcept { return values_[3]; }

  ResourceVector& operator+=(const ResourceVector& other) noexcept {
    for (std::size_t i = 0; i < kNumResourceKinds; ++i) values_[i] += other.values_[i];
    return *this;
  }

  ResourceVector operator+(const ResourceVector& other) const noexcept {
    ResourceVector out = *this;
    out += other;
    return out;
  }

  /// Component-wise subtraction. A negative component is an error, never a
  /// clamp.
  ResourceVector operator-(const ResourceVector& other) const {
    ResourceVector out;
    for (std::size_t i = 0; i < kNumResourceKinds; ++i) {
      const double v = values_[i] - other.values_[i];
      if (v < 0.0) {
        throw DomainError(std::string("resource subtraction is negative for ") +
                          to_string(static_cast<ResourceKind>(i)));
      }
      out.values_[i] = v;
    }
    return out;
  }

  ResourceVector scaled(double factor) const {
    if (!(factor >= 0.0) || !std::isfinite(factor)) {
      throw DomainError("scale factor must be finite and non-negative");
    }
    ResourceVector out;
    for (std::size_t i = 0; i < kNumResourceKinds; ++i) out.values_[i] = values_[i] * factor;
    return out;
  }

  bool fits_within(const ResourceVector& limit) const noexcept {
    for (std::size_t i = 0; i < kNumResourceKinds; ++i) {
      if (values_[i] > limit.values_[i]) return false;
    }
    return true;
  }

  bool is_zero() const noexcept {
    for (double v : values_) {
      if (v != 0.0) return false;
    }
    return true;
  }

  bool operator==(const ResourceVector&) const = default;

private:
  std::array<double, kNumResourceKinds> values_{};
};

}  // namespace edgeprov

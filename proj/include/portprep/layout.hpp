#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "portprep/errors.hpp"

namespace portprep {

using Index = std::int64_t;

struct Register {
  std::string label;
  Index dim = 0;
};

/// An ordered list of labeled registers. Basis states are indexed in
/// mixed radix with the leftmost register most significant, so the flat
/// index of a tensor product is the concatenation of the factor indices.
class RegisterLayout {
 public:
  RegisterLayout() = default;

  explicit RegisterLayout(std::vector<Register> registers)
      : registers_(std::move(registers)) {
    for (const auto& reg : registers_) {
      if (reg.dim < 1) {
        throw LayoutError("register '" + reg.label + "' has dimension " +
                          std::to_string(reg.dim));
      }
    }
    for (std::size_t i = 0; i < registers_.size(); ++i) {
      for (std::size_t j = i + 1; j < registers_.size(); ++j) {
        if (registers_[i].label == registers_[j].label) {
          throw LayoutError("duplicate register label '" +
                            registers_[i].label + "'");
        }
      }
    }
    strides_.assign(registers_.size(), 1);
    total_dim_ = 1;
    for (std::size_t i = registers_.size(); i-- > 0;) {
      strides_[i] = total_dim_;
      total_dim_ *= registers_[i].dim;
    }
  }

  RegisterLayout(std::initializer_list<Register> registers)
      : RegisterLayout(std::vector<Register>(registers)) {}

  static RegisterLayout single(std::string label, Index dim) {
    return RegisterLayout({Register{std::move(label), dim}});
  }

  std::size_t size() const { return registers_.size(); }
  Index total_dim() const { return total_dim_; }
  const Register& at(std::size_t i) const { return registers_.at(i); }
  const std::vector<Register>& registers() const { return registers_; }

  /// Stride of register i: flat index = sum_i digit_i * stride(i).
  Index stride(std::size_t i) const { return strides_.at(i); }

  std::optional<std::size_t> find(const std::string& label) const {
    for (std::size_t i = 0; i < registers_.size(); ++i) {
      if (registers_[i].label == label) {
        return i;
      }
    }
    return std::nullopt;
  }

  std::size_t position_of(const std::string& label) const {
    if (auto pos = find(label)) {
      return *pos;
    }
    throw LayoutError("unknown register label '" + label + "'");
  }

  std::vector<std::size_t> positions_of(
      std::span<const std::string> labels) const {
    std::vector<std::size_t> positions;
    positions.reserve(labels.size());
    for (const auto& label : labels) {
      positions.push_back(position_of(label));
    }
    return positions;
  }

  /// Labels not contained in `labels`, in layout order.
  std::vector<std::string> complement(
      std::span<const std::string> labels) const {
    std::vector<std::string> rest;
    for (const auto& reg : registers_) {
      if (std::find(labels.begin(), labels.end(), reg.label) == labels.end()) {
        rest.push_back(reg.label);
      }
    }
    return rest;
  }

  /// Sub-layout of the given labels, kept in their original layout order.
  RegisterLayout subset(std::span<const std::string> labels) const {
    std::vector<Register> regs;
    for (const auto& reg : registers_) {
      if (std::find(labels.begin(), labels.end(), reg.label) != labels.end()) {
        regs.push_back(reg);
      }
    }
    if (regs.size() != labels.size()) {
      for (const auto& label : labels) {
        position_of(label);  // throws with the offending label
      }
    }
    return RegisterLayout(std::move(regs));
  }

  RegisterLayout concat(const RegisterLayout& other) const {
    std::vector<Register> regs = registers_;
    regs.insert(regs.end(), other.registers_.begin(), other.registers_.end());
    return RegisterLayout(std::move(regs));
  }

  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    out.reserve(registers_.size());
    for (const auto& reg : registers_) {
      out.push_back(reg.label);
    }
    return out;
  }

  bool operator==(const RegisterLayout& other) const {
    if (registers_.size() != other.registers_.size()) {
      return false;
    }
    for (std::size_t i = 0; i < registers_.size(); ++i) {
      if (registers_[i].label != other.registers_[i].label ||
          registers_[i].dim != other.registers_[i].dim) {
        return false;
      }
    }
    return true;
  }
  bool operator!=(const RegisterLayout& other) const {
    return !(*this == other);
  }

  std::string to_string() const {
    std::string out = "[";
    for (std::size_t i = 0; i < registers_.size(); ++i) {
      if (i > 0) {
        out += ", ";
      }
      out += registers_[i].label + ":" + std::to_string(registers_[i].dim);
    }
    return out + "]";
  }

 private:
  std::vector<Register> registers_;
  std::vector<Index> strides_;
  Index total_dim_ = 1;
};

/// Flat-index offsets of every assignment of the registers at `positions`,
/// enumerated in mixed radix (first position most significant). Offsets of
/// disjoint position sets add up to full flat indices.
inline std::vector<Index> subindex_offsets(
    const RegisterLayout& layout, std::span<const std::size_t> positions) {
  Index count = 1;
  for (std::size_t p : positions) {
    count *= layout.at(p).dim;
  }
  std::vector<Index> offsets(static_cast<std::size_t>(count), 0);
  Index block = 1;
  for (std::size_t k = positions.size(); k-- > 0;) {
    const std::size_t p = positions[k];
    const Index dim = layout.at(p).dim;
    const Index stride = layout.stride(p);
    for (Index idx = 0; idx < count; ++idx) {
      const Index digit = (idx / block) % dim;
      offsets[static_cast<std::size_t>(idx)] += digit * stride;
    }
    block *= dim;
  }
  return offsets;
}

}  // namespace portprep

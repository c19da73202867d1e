#pragma once

#include <string>
#include <utility>
#include <vector>

#include "portprep/linalg.hpp"

namespace portprep {

/// An ordered list of positive operators summing to identity, with integer
/// outcome labels aligned to the elements. Positivity and completeness are
/// exposed as residuals so verification layers can check (and fail) them.
class Povm {
 public:
  Povm(RegisterLayout layout, std::vector<HermitianOperator> elements,
       std::vector<int> outcomes)
      : layout_(std::move(layout)),
        elements_(std::move(elements)),
        outcomes_(std::move(outcomes)) {
    if (elements_.size() != outcomes_.size()) {
      throw DomainError("POVM outcome labels do not match element count");
    }
    for (const auto& element : elements_) {
      require_equal_layouts(layout_, element.layout());
    }
  }

  const RegisterLayout& layout() const { return layout_; }
  std::size_t size() const { return elements_.size(); }
  const HermitianOperator& element(std::size_t i) const {
    return elements_.at(i);
  }
  int outcome(std::size_t i) const { return outcomes_.at(i); }
  const std::vector<HermitianOperator>& elements() const { return elements_; }

  /// Max elementwise deviation of sum_x M_x from identity.
  double completeness_residual() const {
    const Index dim = layout_.total_dim();
    Matrix sum = Matrix::Zero(dim, dim);
    for (const auto& element : elements_) {
      sum += element.matrix();
    }
    return (sum - Matrix::Identity(dim, dim)).cwiseAbs().maxCoeff();
  }

  /// Smallest eigenvalue over all elements (>= 0 for a valid POVM up to
  /// numerical noise).
  double min_eigenvalue() const {
    double smallest = 0.0;
    for (const auto& element : elements_) {
      const Eigensystem eig = eigensystem(element.matrix());
      smallest = std::min(smallest, eig.values.minCoeff());
    }
    return smallest;
  }

  /// Test hook: scales one element, breaking completeness on purpose.
  void scale_element(std::size_t i, double factor) {
    elements_.at(i) =
        HermitianOperator(layout_, elements_.at(i).matrix() * factor);
  }

 private:
  RegisterLayout layout_;
  std::vector<HermitianOperator> elements_;
  std::vector<int> outcomes_;
};

}  // namespace portprep

// Copyright (C) 2026 EDA contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "eda/field.hpp"

namespace eda {

/// Fully connected network with tanh hidden layers and a linear output
/// layer. Parameters live in one flat vector, layer by layer: row-major
/// weights (out x in) followed by biases.
class TinyNetwork {
 public:
  /// Cached activations of one forward pass; activations[0] is the input.
  struct Tape {
    std::vector<std::vector<double>> activations;
  };

  explicit TinyNetwork(std::vector<std::size_t> widths);
  /// Weights ~ N(0, 1/fan_in), biases zero.
  static TinyNetwork initialized(std::vector<std::size_t> widths, Rng& rng);

  const std::vector<std::size_t>& widths() const noexcept { return widths_; }
  std::size_t input_dim() const noexcept { return widths_.front(); }
  std::size_t output_dim() const noexcept { return widths_.back(); }
  std::size_t parameter_count() const noexcept { return params_.size(); }

  std::span<const double> parameters() const noexcept { return params_; }
  std::span<double> parameters() noexcept { return params_; }

  std::vector<double> forward(std::span<const double> input, Tape* tape = nullptr) const;
  /// Adds d(output . grad_output)/d(params) into `grad_params`.
  void backward(const Tape& tape, std::span<const double> grad_output,
                std::span<double> grad_params) const;

  void write(std::ostream& out) const;
  static TinyNetwork read(std::istream& in);
  void save(const std::string& path) const;
  static TinyNetwork load(const std::string& path);

 private:
  std::size_t layer_offset(std::size_t layer) const { return offsets_[layer]; }

  std::vector<std::size_t> widths_;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
};

}  // namespace eda

// Copyright (C) 2026 EDA contributors
// SPDX-License-Identifier: Apache-2.0

#include "eda/network.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "eda/error.hpp"

namespace eda {

namespace {
constexpr char kMagic[8] = {'E', 'D', 'A', 'N', 'E', 'T', '0', '1'};
}

TinyNetwork::TinyNetwork(std::vector<std::size_t> widths) : widths_(std::move(widths)) {
  require(widths_.size() >= 2, ErrorCode::kInvalidArgument, "network needs at least two widths");
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    require(widths_[l] > 0 && widths_[l + 1] > 0, ErrorCode::kInvalidArgument,
            "network widths must be positive");
    offsets_.push_back(total);
    total += widths_[l + 1] * widths_[l] + widths_[l + 1];
  }
  params_.assign(total, 0.0);
}

TinyNetwork TinyNetwork::initialized(std::vector<std::size_t> widths, Rng& rng) {
  TinyNetwork net(std::move(widths));
  for (std::size_t l = 0; l + 1 < net.widths_.size(); ++l) {
    const std::size_t in = net.widths_[l], out = net.widths_[l + 1];
    const double scale = 1.0 / std::sqrt(static_cast<double>(in));
    double* w = net.params_.data() + net.offsets_[l];
    for (std::size_t i = 0; i < in * out; ++i) w[i] = scale * rng.normal();
  }
  return net;
}

std::vector<double> TinyNetwork::forward(std::span<const double> input, Tape* tape) const {
  require(input.size() == input_dim(), ErrorCode::kShapeMismatch,
          "network input has " + std::to_string(input.size()) + " entries, expected " +
              std::to_string(input_dim()));
  std::vector<double> a(input.begin(), input.end());
  if (tape) {
    tape->activations.clear();
    tape->activations.push_back(a);
  }
  const std::size_t layers = widths_.size() - 1;
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t in = widths_[l], out = widths_[l + 1];
    const double* w = params_.data() + offsets_[l];
    const double* b = w + in * out;
    std::vector<double> z(out);
    for (std::size_t o = 0; o < out; ++o) {
      double acc = b[o];
      const double* row = w + o * in;
      for (std::size_t i = 0; i < in; ++i) acc += row[i] * a[i];
      z[o] = (l + 1 < layers) ? std::tanh(acc) : acc;
    }
    a = std::move(z);
    if (tape) tape->activations.push_back(a);
  }
  return a;
}

void TinyNetwork::backward(const Tape& tape, std::span<const double> grad_output,
                           std::span<double> grad_params) const {
  const std::size_t layers = widths_.size() - 1;
  require(tape.activations.size() == layers + 1, ErrorCode::kInvalidArgument,
          "tape does not match network");
  require(grad_output.size() == output_dim(), ErrorCode::kShapeMismatch, "grad_output size");
  require(grad_params.size() == params_.size(), ErrorCode::kShapeMismatch, "grad_params size");

  std::vector<double> delta(grad_output.begin(), grad_output.end());
  for (std::size_t l = layers; l-- > 0;) {
    const std::size_t in = widths_[l], out = widths_[l + 1];
    if (l + 1 < layers) {
      const auto& act = tape.activations[l + 1];
      for (std::size_t o = 0; o < out; ++o) delta[o] *= 1.0 - act[o] * act[o];
    }
    const auto& a_in = tape.activations[l];
    const double* w = params_.data() + offsets_[l];
    double* gw = grad_params.data() + offsets_[l];
    double* gb = gw + in * out;
    for (std::size_t o = 0; o < out; ++o) {
      double* grow = gw + o * in;
      for (std::size_t i = 0; i < in; ++i) grow[i] += delta[o] * a_in[i];
      gb[o] += delta[o];
    }
    if (l == 0) break;
    std::vector<double> prev(in, 0.0);
    for (std::size_t o = 0; o < out; ++o) {
      const double* row = w + o * in;
      for (std::size_t i = 0; i < in; ++i) prev[i] += row[i] * delta[o];
    }
    delta = std::move(prev);
  }
}

void TinyNetwork::write(std::ostream& out) const {
  out.write(kMagic, sizeof(kMagic));
  Field header({widths_.size()});
  for (std::size_t i = 0; i < widths_.size(); ++i) header[i] = static_cast<double>(widths_[i]);
  write_field(out, header);
  write_field(out, Field({params_.size()}, params_));
}

TinyNetwork TinyNetwork::read(std::istream& in) {
  char magic[8];
  in.read(magic, sizeof(magic));
  require(in && std::memcmp(magic, kMagic, sizeof(kMagic)) == 0, ErrorCode::kParse,
          "not a network checkpoint");
  const Field header = read_field(in);
  require(header.rank() == 1 && header.size() >= 2, ErrorCode::kParse, "bad network header");
  std::vector<std::size_t> widths;
  for (double w : header.values()) {
    require(w >= 1.0 && w == std::floor(w) && w < 1e7, ErrorCode::kParse, "bad network width");
    widths.push_back(static_cast<std::size_t>(w));
  }
  TinyNetwork net(std::move(widths));
  const Field params = read_field(in);
  require(params.size() == net.parameter_count(), ErrorCode::kParse,
          "checkpoint parameter count does not match architecture");
  std::copy(params.values().begin(), params.values().end(), net.params_.begin());
  return net;
}

void TinyNetwork::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorCode::kIo, "cannot open " + path);
  write(out);
  require(static_cast<bool>(out), ErrorCode::kIo, "failed writing " + path);
}

TinyNetwork TinyNetwork::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::kIo, "cannot open " + path);
  return read(in);
}

}  // namespace eda

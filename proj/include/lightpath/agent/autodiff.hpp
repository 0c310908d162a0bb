#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace lightpath::agent {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;
};

// Owns learned tensors. Element addresses are stable across Add().
class ParameterStore {
 public:
  std::size_t Add(std::string name, Matrix init);

  Parameter& at(std::size_t i) { return params_.at(i); }
  const Parameter& at(std::size_t i) const { return params_.at(i); }
  std::size_t size() const { return params_.size(); }
  std::size_t scalar_count() const;

  void ZeroGrad();
  double GradNorm() const;
  void ScaleGrad(double factor);
  bool AllFinite() const;

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

 private:
  std::deque<Parameter> params_;
};

struct Var {
  std::int32_t id = -1;
};

// Sparse linear map between row spaces: out.row(o) += weight * in.row(i).
// Covers gathers, scatter-sums, mean pooling and path aggregation.
struct RowMap {
  int out_rows = 0;
  std::vector<int> out;
  std::vector<int> in;
  std::vector<double> weight;

  void Add(int out_row, int in_row, double w = 1.0) {
    out.push_back(out_row);
    in.push_back(in_row);
    weight.push_back(w);
  }
  std::size_t size() const { return out.size(); }
};

// Reverse-mode tape over row-major double matrices. One tape per forward
// pass; not shared between threads. Parameter gradients accumulate into the
// ParameterStore on Backward().
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, const Matrix& out_grad)>;

  // With record_grad = false parameters enter as constants and no backward
  // closures are kept (inference only).
  explicit Tape(bool record_grad = true) : record_grad_(record_grad) {}

  Var Constant(Matrix value);
  Var Param(ParameterStore& store, std::size_t index);
  // Records an op output. `fn` is only stored and run if a parent needs grads.
  Var Record(Matrix value, std::initializer_list<Var> parents, BackwardFn fn);
  Var Record(Matrix value, std::span<const Var> parents, BackwardFn fn);

  const Matrix& value(Var v) const { return nodes_.at(static_cast<std::size_t>(v.id)).value; }
  bool requires_grad(Var v) const { return nodes_.at(static_cast<std::size_t>(v.id)).requires_grad; }

  // Adds `g` to the gradient of `v`; no-op for constants.
  void Accumulate(Var v, const Matrix& g);
  // Grad buffer for in-place accumulation, zero-initialised on first use.
  Matrix* GradBuffer(Var v);

  // Root must be 1x1. Seeds d(root)/d(root) = 1.
  void Backward(Var root);

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
    bool has_grad = false;
    BackwardFn backward;
    Parameter* param = nullptr;
  };
  std::vector<Node> nodes_;
  bool record_grad_;
};

Var MatMul(Tape& tape, Var a, Var b);
Var Add(Tape& tape, Var a, Var b);
// x + row broadcast over rows (bias).
Var AddRow(Tape& tape, Var x, Var row);
Var Tanh(Tape& tape, Var x);
Var LeakyRelu(Tape& tape, Var x, double slope = 0.2);
Var ConcatCols(Tape& tape, std::span<const Var> parts);
Var ConcatCols(Tape& tape, std::initializer_list<Var> parts);
// `map` must outlive Backward().
Var MapRows(Tape& tape, Var x, const RowMap& map);
// Row-wise scaling of x (m x n) by col (m x 1).
Var ScaleRows(Tape& tape, Var x, Var col);
// Softmax of a column of scores within each segment.
Var SegmentSoftmax(Tape& tape, Var scores, std::span<const int> segment, int segment_count);
// Mean of all entries, 1x1.
Var Mean(Tape& tape, Var x);
// Sum of all entries, 1x1.
Var Sum(Tape& tape, Var x);

}  // namespace lightpath::agent

#include "lightpath/agent/autodiff.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace lightpath::agent {

std::size_t ParameterStore::Add(std::string name, Matrix init) {
  Parameter p{std::move(name), std::move(init), Matrix()};
  p.grad = Matrix::Zero(p.value.rows(), p.value.cols());
  params_.push_back(std::move(p));
  return params_.size() - 1;
}

std::size_t ParameterStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += static_cast<std::size_t>(p.value.size());
  return n;
}

void ParameterStore::ZeroGrad() {
  for (auto& p : params_) p.grad.setZero();
}

double ParameterStore::GradNorm() const {
  double sq = 0.0;
  for (const auto& p : params_) sq += p.grad.squaredNorm();
  return std::sqrt(sq);
}

void ParameterStore::ScaleGrad(double factor) {
  for (auto& p : params_) p.grad *= factor;
}

bool ParameterStore::AllFinite() const {
  for (const auto& p : params_) {
    if (!p.value.allFinite()) return false;
  }
  return true;
}

Var Tape::Constant(Matrix value) {
  Node n;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return Var{static_cast<std::int32_t>(nodes_.size() - 1)};
}

Var Tape::Param(ParameterStore& store, std::size_t index) {
  Node n;
  Parameter& p = store.at(index);
  n.value = p.value;
  n.requires_grad = record_grad_;
  n.param = record_grad_ ? &p : nullptr;
  nodes_.push_back(std::move(n));
  return Var{static_cast<std::int32_t>(nodes_.size() - 1)};
}

Var Tape::Record(Matrix value, std::span<const Var> parents, BackwardFn fn) {
  Node n;
  n.value = std::move(value);
  for (Var p : parents) n.requires_grad = n.requires_grad || requires_grad(p);
  if (n.requires_grad) n.backward = std::move(fn);
  nodes_.push_back(std::move(n));
  return Var{static_cast<std::int32_t>(nodes_.size() - 1)};
}

Var Tape::Record(Matrix value, std::initializer_list<Var> parents, BackwardFn fn) {
  return Record(std::move(value), std::span<const Var>(parents.begin(), parents.size()), std::move(fn));
}

Matrix* Tape::GradBuffer(Var v) {
  Node& n = nodes_.at(static_cast<std::size_t>(v.id));
  if (!n.requires_grad) return nullptr;
  if (!n.has_grad) {
    n.grad = Matrix::Zero(n.value.rows(), n.value.cols());
    n.has_grad = true;
  }
  return &n.grad;
}

void Tape::Accumulate(Var v, const Matrix& g) {
  if (Matrix* buf = GradBuffer(v)) *buf += g;
}

void Tape::Backward(Var root) {
  Node& r = nodes_.at(static_cast<std::size_t>(root.id));
  if (r.value.rows() != 1 || r.value.cols() != 1) throw std::invalid_argument("Backward: root must be 1x1");
  if (!r.requires_grad) return;
  *GradBuffer(root) = Matrix::Constant(1, 1, 1.0);
  for (std::int64_t i = root.id; i >= 0; --i) {
    Node& n = nodes_[static_cast<std::size_t>(i)];
    if (!n.has_grad) continue;
    if (n.backward) {
      // The callback may accumulate into earlier nodes, never into this one.
      const Matrix g = std::move(n.grad);
      n.has_grad = false;
      n.backward(*this, g);
    } else if (n.param != nullptr) {
      n.param->grad += n.grad;
    }
  }
}

Var MatMul(Tape& tape, Var a, Var b) {
  Matrix out = tape.value(a) * tape.value(b);
  return tape.Record(std::move(out), {a, b}, [a, b](Tape& t, const Matrix& g) {
    if (Matrix* ga = t.GradBuffer(a)) ga->noalias() += g * t.value(b).transpose();
    if (Matrix* gb = t.GradBuffer(b)) gb->noalias() += t.value(a).transpose() * g;
  });
}

Var Add(Tape& tape, Var a, Var b) {
  Matrix out = tape.value(a) + tape.value(b);
  return tape.Record(std::move(out), {a, b}, [a, b](Tape& t, const Matrix& g) {
    t.Accumulate(a, g);
    t.Accumulate(b, g);
  });
}

Var AddRow(Tape& tape, Var x, Var row) {
  const Matrix& xv = tape.value(x);
  const Matrix& rv = tape.value(row);
  if (rv.rows() != 1 || rv.cols() != xv.cols()) throw std::invalid_argument("AddRow: shape mismatch");
  Matrix out = xv.rowwise() + rv.row(0);
  return tape.Record(std::move(out), {x, row}, [x, row](Tape& t, const Matrix& g) {
    t.Accumulate(x, g);
    if (Matrix* gr = t.GradBuffer(row)) *gr += g.colwise().sum();
  });
}

Var Tanh(Tape& tape, Var x) {
  Matrix out = tape.value(x).array().tanh().matrix();
  const Var self{static_cast<std::int32_t>(tape.size())};
  return tape.Record(std::move(out), {x}, [x, self](Tape& t, const Matrix& g) {
    if (Matrix* gx = t.GradBuffer(x)) *gx += (g.array() * (1.0 - t.value(self).array().square())).matrix();
  });
}

Var LeakyRelu(Tape& tape, Var x, double slope) {
  const Matrix& xv = tape.value(x);
  Matrix out = xv.unaryExpr([slope](double v) { return v > 0.0 ? v : slope * v; });
  return tape.Record(std::move(out), {x}, [x, slope](Tape& t, const Matrix& g) {
    const Matrix& xv2 = t.value(x);
    if (Matrix* gx = t.GradBuffer(x)) {
      *gx += g.binaryExpr(xv2, [slope](double gi, double v) { return v > 0.0 ? gi : slope * gi; });
    }
  });
}

Var ConcatCols(Tape& tape, std::span<const Var> parts) {
  if (parts.empty()) throw std::invalid_argument("ConcatCols: no inputs");
  const Eigen::Index rows = tape.value(parts[0]).rows();
  Eigen::Index cols = 0;
  for (Var p : parts) {
    if (tape.value(p).rows() != rows) throw std::invalid_argument("ConcatCols: row count mismatch");
    cols += tape.value(p).cols();
  }
  Matrix out(rows, cols);
  Eigen::Index c = 0;
  for (Var p : parts) {
    const Matrix& v = tape.value(p);
    out.middleCols(c, v.cols()) = v;
    c += v.cols();
  }
  std::vector<Var> copy(parts.begin(), parts.end());
  return tape.Record(std::move(out), parts, [copy](Tape& t, const Matrix& g) {
    Eigen::Index offset = 0;
    for (Var p : copy) {
      const Eigen::Index w = t.value(p).cols();
      if (Matrix* gp = t.GradBuffer(p)) *gp += g.middleCols(offset, w);
      offset += w;
    }
  });
}

Var ConcatCols(Tape& tape, std::initializer_list<Var> parts) {
  return ConcatCols(tape, std::span<const Var>(parts.begin(), parts.size()));
}

Var MapRows(Tape& tape, Var x, const RowMap& map) {
  const Matrix& xv = tape.value(x);
  Matrix out = Matrix::Zero(map.out_rows, xv.cols());
  for (std::size_t i = 0; i < map.size(); ++i) {
    out.row(map.out[i]) += map.weight[i] * xv.row(map.in[i]);
  }
  const RowMap* m = &map;
  return tape.Record(std::move(out), {x}, [x, m](Tape& t, const Matrix& g) {
    if (Matrix* gx = t.GradBuffer(x)) {
      for (std::size_t i = 0; i < m->size(); ++i) gx->row(m->in[i]) += m->weight[i] * g.row(m->out[i]);
    }
  });
}

Var ScaleRows(Tape& tape, Var x, Var col) {
  const Matrix& xv = tape.value(x);
  const Matrix& cv = tape.value(col);
  if (cv.cols() != 1 || cv.rows() != xv.rows()) throw std::invalid_argument("ScaleRows: shape mismatch");
  Matrix out = xv.array().colwise() * cv.col(0).array();
  return tape.Record(std::move(out), {x, col}, [x, col](Tape& t, const Matrix& g) {
    if (Matrix* gx = t.GradBuffer(x)) *gx += (g.array().colwise() * t.value(col).col(0).array()).matrix();
    if (Matrix* gc = t.GradBuffer(col)) *gc += (g.array() * t.value(x).array()).rowwise().sum().matrix();
  });
}

Var SegmentSoftmax(Tape& tape, Var scores, std::span<const int> segment, int segment_count) {
  const Matrix& sv = tape.value(scores);
  if (sv.cols() != 1 || static_cast<std::size_t>(sv.rows()) != segment.size()) {
    throw std::invalid_argument("SegmentSoftmax: expected one score per segment entry");
  }
  std::vector<double> max(static_cast<std::size_t>(segment_count), -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < segment.size(); ++i) max[segment[i]] = std::max(max[segment[i]], sv(i, 0));
  Matrix out(sv.rows(), 1);
  std::vector<double> total(static_cast<std::size_t>(segment_count), 0.0);
  for (std::size_t i = 0; i < segment.size(); ++i) {
    out(i, 0) = std::exp(sv(i, 0) - max[segment[i]]);
    total[segment[i]] += out(i, 0);
  }
  for (std::size_t i = 0; i < segment.size(); ++i) out(i, 0) /= total[segment[i]];
  std::vector<int> seg(segment.begin(), segment.end());
  Matrix probs = out;
  return tape.Record(std::move(out), {scores}, [scores, seg, probs, segment_count](Tape& t, const Matrix& g) {
    Matrix* gs = t.GradBuffer(scores);
    if (gs == nullptr) return;
    std::vector<double> dot(static_cast<std::size_t>(segment_count), 0.0);
    for (std::size_t i = 0; i < seg.size(); ++i) dot[seg[i]] += g(i, 0) * probs(i, 0);
    for (std::size_t i = 0; i < seg.size(); ++i) (*gs)(i, 0) += probs(i, 0) * (g(i, 0) - dot[seg[i]]);
  });
}

Var Mean(Tape& tape, Var x) {
  const Matrix& xv = tape.value(x);
  const double n = static_cast<double>(xv.size());
  Matrix out = Matrix::Constant(1, 1, xv.mean());
  return tape.Record(std::move(out), {x}, [x, n](Tape& t, const Matrix& g) {
    if (Matrix* gx = t.GradBuffer(x)) gx->array() += g(0, 0) / n;
  });
}

Var Sum(Tape& tape, Var x) {
  Matrix out = Matrix::Constant(1, 1, tape.value(x).sum());
  return tape.Record(std::move(out), {x}, [x](Tape& t, const Matrix& g) {
    if (Matrix* gx = t.GradBuffer(x)) gx->array() += g(0, 0);
  });
}

}  // namespace lightpath::agent

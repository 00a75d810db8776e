#include "topicsent/autograd.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>

namespace topicsent::ag {
namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMatrix>;
using ConstMatMap = Eigen::Map<const RowMatrix>;

ConstMatMap as_matrix(const Tensor& t) {
  return ConstMatMap(t.data(), static_cast<Eigen::Index>(t.rows()),
                     static_cast<Eigen::Index>(t.cols()));
}

MatMap as_matrix(Tensor& t) {
  return MatMap(t.data(), static_cast<Eigen::Index>(t.rows()),
                static_cast<Eigen::Index>(t.cols()));
}

void require_2d(const Tensor& t, const char* op) {
  if (t.rank() != 2) {
    throw ShapeError(std::string(op) + ": expected a 2-D tensor, got " +
                     shape_string(t.shape()));
  }
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape mismatch " +
                     shape_string(a.shape()) + " vs " + shape_string(b.shape()));
  }
}

void require_same_tape(Var a, Var b) {
  if (&a.tape() != &b.tape()) throw std::logic_error("vars from different tapes");
}

template <typename F>
Var unary_elementwise(Var a, F forward, Tape::Backward backward) {
  Tensor out(a.shape());
  const auto in = a.value().values();
  auto dst = out.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = forward(in[i]);
  return a.tape().record(std::move(out), {a}, std::move(backward));
}

}  // namespace

const Tensor& Var::value() const { return tape_->value(*this); }

Var Tape::constant(Tensor value) {
  nodes_.push_back(Node{std::move(value), {}, {}, nullptr, false});
  return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1));
}

Var Tape::parameter(Parameter& param) {
  nodes_.push_back(Node{param.value, {}, {}, &param, true});
  return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1));
}

Var Tape::record(Tensor value, std::initializer_list<Var> parents, Backward backward) {
  return record(std::move(value), std::span<const Var>(parents.begin(), parents.size()),
                std::move(backward));
}

Var Tape::record(Tensor value, std::span<const Var> parents, Backward backward) {
  if (!value.all_finite()) {
    throw NumericError("non-finite value produced at tape node " +
                       std::to_string(nodes_.size()));
  }
  bool needs = false;
  for (Var p : parents) {
    if (&p.tape() != this) throw std::logic_error("parent var from another tape");
    needs = needs || nodes_[p.index()].requires_grad;
  }
  nodes_.push_back(Node{std::move(value), {}, needs ? std::move(backward) : Backward{},
                        nullptr, needs});
  return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1));
}

Tensor& Tape::grad_buffer(std::uint32_t index) {
  Node& node = nodes_.at(index);
  if (node.grad.shape() != node.value.shape()) node.grad = Tensor(node.value.shape());
  return node.grad;
}

Tensor Tape::grad(Var v) const {
  const Node& node = nodes_.at(v.index());
  if (node.grad.shape() != node.value.shape()) return Tensor(node.value.shape());
  return node.grad;
}

void Tape::backward(Var loss) {
  if (consumed_) throw std::logic_error("tape backward pass already run");
  consumed_ = true;
  if (loss.value().size() != 1) {
    throw ShapeError("backward() needs a scalar loss, got " +
                     shape_string(loss.value().shape()));
  }
  if (!nodes_[loss.index()].requires_grad) return;
  grad_buffer(loss.index()).fill(1.0);
  for (std::size_t i = loss.index() + 1; i-- > 0;) {
    Node& node = nodes_[i];
    if (!node.requires_grad || node.grad.shape() != node.value.shape()) continue;
    if (node.param != nullptr) {
      auto dst = node.param->grad.values();
      if (node.param->grad.shape() != node.value.shape()) {
        node.param->grad = Tensor(node.value.shape());
        dst = node.param->grad.values();
      }
      const auto src = node.grad.values();
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
    } else if (node.backward) {
      node.backward(*this, node.value, node.grad);
    }
  }
}

Var matmul(Var a, Var b) {
  require_same_tape(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  require_2d(av, "matmul");
  require_2d(bv, "matmul");
  if (av.cols() != bv.rows()) {
    throw ShapeError("matmul: inner dimensions differ " + shape_string(av.shape()) +
                     " x " + shape_string(bv.shape()));
  }
  Tensor out = Tensor::matrix(av.rows(), bv.cols());
  as_matrix(out).noalias() = as_matrix(av) * as_matrix(bv);
  const auto ai = a.index();
  const auto bi = b.index();
  return a.tape().record(std::move(out), {a, b},
                         [ai, bi](Tape& tape, const Tensor&, const Tensor& g) {
                           if (tape.requires_grad(ai)) {
                             as_matrix(tape.grad_buffer(ai)).noalias() +=
                                 as_matrix(g) * as_matrix(tape.value(bi)).transpose();
                           }
                           if (tape.requires_grad(bi)) {
                             as_matrix(tape.grad_buffer(bi)).noalias() +=
                                 as_matrix(tape.value(ai)).transpose() * as_matrix(g);
                           }
                         });
}

Var add(Var a, Var b) {
  require_same_tape(a, b);
  require_same_shape(a.value(), b.value(), "add");
  Tensor out = a.value();
  const auto bv = b.value().values();
  auto dst = out.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += bv[i];
  const auto ai = a.index();
  const auto bi = b.index();
  return a.tape().record(std::move(out), {a, b},
                         [ai, bi](Tape& tape, const Tensor&, const Tensor& g) {
                           for (auto idx : {ai, bi}) {
                             if (!tape.requires_grad(idx)) continue;
                             auto d = tape.grad_buffer(idx).values();
                             for (std::size_t i = 0; i < d.size(); ++i) d[i] += g[i];
                           }
                         });
}

Var sub(Var a, Var b) {
  require_same_tape(a, b);
  require_same_shape(a.value(), b.value(), "sub");
  Tensor out = a.value();
  const auto bv = b.value().values();
  auto dst = out.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] -= bv[i];
  const auto ai = a.index();
  const auto bi = b.index();
  return a.tape().record(std::move(out), {a, b},
                         [ai, bi](Tape& tape, const Tensor&, const Tensor& g) {
                           if (tape.requires_grad(ai)) {
                             auto d = tape.grad_buffer(ai).values();
                             for (std::size_t i = 0; i < d.size(); ++i) d[i] += g[i];
                           }
                           if (tape.requires_grad(bi)) {
                             auto d = tape.grad_buffer(bi).values();
                             for (std::size_t i = 0; i < d.size(); ++i) d[i] -= g[i];
                           }
                         });
}

Var mul(Var a, Var b) {
  require_same_tape(a, b);
  require_same_shape(a.value(), b.value(), "mul");
  Tensor out = a.value();
  const auto bv = b.value().values();
  auto dst = out.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] *= bv[i];
  const auto ai = a.index();
  const auto bi = b.index();
  return a.tape().record(std::move(out), {a, b},
                         [ai, bi](Tape& tape, const Tensor&, const Tensor& g) {
                           if (tape.requires_grad(ai)) {
                             const auto other = tape.value(bi).values();
                             auto d = tape.grad_buffer(ai).values();
                             for (std::size_t i = 0; i < d.size(); ++i) d[i] += g[i] * other[i];
                           }
                           if (tape.requires_grad(bi)) {
                             const auto other = tape.value(ai).values();
                             auto d = tape.grad_buffer(bi).values();
                             for (std::size_t i = 0; i < d.size(); ++i) d[i] += g[i] * other[i];
                           }
                         });
}

Var add_row(Var a, Var bias) {
  require_same_tape(a, bias);
  const Tensor& av = a.value();
  require_2d(av, "add_row");
  if (bias.value().size() != av.cols()) {
    throw ShapeError("add_row: bias " + shape_string(bias.value().shape()) +
                     " does not match " + shape_string(av.shape()));
  }
  Tensor out = av;
  const auto b = bias.value().values();
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] += b[c];
  }
  const auto ai = a.index();
  const auto bi = bias.index();
  return a.tape().record(std::move(out), {a, bias},
                         [ai, bi](Tape& tape, const Tensor&, const Tensor& g) {
                           if (tape.requires_grad(ai)) {
                             auto d = tape.grad_buffer(ai).values();
                             for (std::size_t i = 0; i < d.size(); ++i) d[i] += g[i];
                           }
                           if (tape.requires_grad(bi)) {
                             auto d = tape.grad_buffer(bi).values();
                             for (std::size_t r = 0; r < g.rows(); ++r) {
                               const auto gr = g.row(r);
                               for (std::size_t c = 0; c < d.size(); ++c) d[c] += gr[c];
                             }
                           }
                         });
}

Var scale(Var a, double factor) {
  const auto ai = a.index();
  return unary_elementwise(
      a, [factor](double x) { return factor * x; },
      [ai, factor](Tape& tape, const Tensor&, const Tensor& g) {
        auto d = tape.grad_buffer(ai).values();
        for (std::size_t i = 0; i < d.size(); ++i) d[i] += factor * g[i];
      });
}

Var sigmoid(Var a) {
  const auto ai = a.index();
  return unary_elementwise(
      a,
      [](double x) {
        if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      },
      [ai](Tape& tape, const Tensor& y, const Tensor& g) {
        auto d = tape.grad_buffer(ai).values();
        for (std::size_t i = 0; i < d.size(); ++i) d[i] += g[i] * y[i] * (1.0 - y[i]);
      });
}

Var tanh(Var a) {
  const auto ai = a.index();
  return unary_elementwise(
      a, [](double x) { return std::tanh(x); },
      [ai](Tape& tape, const Tensor& y, const Tensor& g) {
        auto d = tape.grad_buffer(ai).values();
        for (std::size_t i = 0; i < d.size(); ++i) d[i] += g[i] * (1.0 - y[i] * y[i]);
      });
}

Var relu(Var a) {
  const auto ai = a.index();
  return unary_elementwise(
      a, [](double x) { return x > 0.0 ? x : 0.0; },
      [ai](Tape& tape, const Tensor& y, const Tensor& g) {
        auto d = tape.grad_buffer(ai).values();
        for (std::size_t i = 0; i < d.size(); ++i) {
          if (y[i] > 0.0) d[i] += g[i];
        }
      });
}

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeError("concat_cols: no inputs");
  const std::size_t rows = parts.front().value().rows();
  std::size_t total = 0;
  std::vector<std::uint32_t> indices;
  std::vector<std::size_t> widths;
  for (Var p : parts) {
    require_same_tape(parts.front(), p);
    require_2d(p.value(), "concat_cols");
    if (p.value().rows() != rows) throw ShapeError("concat_cols: row counts differ");
    indices.push_back(p.index());
    widths.push_back(p.value().cols());
    total += p.value().cols();
  }
  Tensor out = Tensor::matrix(rows, total);
  std::size_t offset = 0;
  for (Var p : parts) {
    const Tensor& v = p.value();
    for (std::size_t r = 0; r < rows; ++r) {
      std::copy_n(v.row(r).data(), v.cols(), out.row(r).data() + offset);
    }
    offset += v.cols();
  }
  return parts.front().tape().record(
      std::move(out), parts,
      [indices, widths](Tape& tape, const Tensor&, const Tensor& g) {
        std::size_t offset = 0;
        for (std::size_t k = 0; k < indices.size(); ++k) {
          if (tape.requires_grad(indices[k])) {
            Tensor& d = tape.grad_buffer(indices[k]);
            for (std::size_t r = 0; r < g.rows(); ++r) {
              const double* src = g.row(r).data() + offset;
              auto dst = d.row(r);
              for (std::size_t c = 0; c < widths[k]; ++c) dst[c] += src[c];
            }
          }
          offset += widths[k];
        }
      });
}

Var slice_cols(Var a, std::size_t begin, std::size_t count) {
  const Tensor& av = a.value();
  require_2d(av, "slice_cols");
  if (begin + count > av.cols()) throw ShapeError("slice_cols: range out of bounds");
  Tensor out = Tensor::matrix(av.rows(), count);
  for (std::size_t r = 0; r < av.rows(); ++r) {
    std::copy_n(av.row(r).data() + begin, count, out.row(r).data());
  }
  const auto ai = a.index();
  return a.tape().record(std::move(out), {a},
                         [ai, begin, count](Tape& tape, const Tensor&, const Tensor& g) {
                           Tensor& d = tape.grad_buffer(ai);
                           for (std::size_t r = 0; r < g.rows(); ++r) {
                             double* dst = d.row(r).data() + begin;
                             const auto src = g.row(r);
                             for (std::size_t c = 0; c < count; ++c) dst[c] += src[c];
                           }
                         });
}

Var reshape(Var a, Tensor::Shape shape) {
  Tensor out = a.value().reshaped(std::move(shape));
  const auto ai = a.index();
  return a.tape().record(std::move(out), {a},
                         [ai](Tape& tape, const Tensor&, const Tensor& g) {
                           auto d = tape.grad_buffer(ai).values();
                           for (std::size_t i = 0; i < d.size(); ++i) d[i] += g[i];
                         });
}

Var gather_rows(Var table, std::span<const int> ids) {
  const Tensor& tv = table.value();
  require_2d(tv, "gather_rows");
  const std::size_t cols = tv.cols();
  Tensor out = Tensor::matrix(ids.size(), cols);
  for (std::size_t r = 0; r < ids.size(); ++r) {
    if (ids[r] < 0) continue;
    if (static_cast<std::size_t>(ids[r]) >= tv.rows()) throw ShapeError("gather_rows: id out of range");
    std::copy_n(tv.row(static_cast<std::size_t>(ids[r])).data(), cols, out.row(r).data());
  }
  const auto ti = table.index();
  std::vector<int> owned(ids.begin(), ids.end());
  return table.tape().record(std::move(out), {table},
                             [ti, owned = std::move(owned)](Tape& tape, const Tensor&,
                                                            const Tensor& g) {
                               Tensor& d = tape.grad_buffer(ti);
                               for (std::size_t r = 0; r < owned.size(); ++r) {
                                 if (owned[r] < 0) continue;
                                 auto dst = d.row(static_cast<std::size_t>(owned[r]));
                                 const auto src = g.row(r);
                                 for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += src[c];
                               }
                             });
}

Var sum(Var a) {
  double total = 0.0;
  for (double x : a.value().values()) total += x;
  const auto ai = a.index();
  return a.tape().record(Tensor::scalar(total), {a},
                         [ai](Tape& tape, const Tensor&, const Tensor& g) {
                           for (double& d : tape.grad_buffer(ai).values()) d += g[0];
                         });
}

Var mean(Var a) {
  const double n = static_cast<double>(a.value().size());
  return scale(sum(a), 1.0 / n);
}

Var mse(Var pred, const Tensor& target) {
  require_same_shape(pred.value(), target, "mse");
  const auto p = pred.value().values();
  const auto t = target.values();
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double diff = p[i] - t[i];
    total += diff * diff;
  }
  const double n = static_cast<double>(p.size());
  const auto pi = pred.index();
  return pred.tape().record(
      Tensor::scalar(total / n), {pred},
      [pi, target, n](Tape& tape, const Tensor&, const Tensor& g) {
        const auto p = tape.value(pi).values();
        const auto t = target.values();
        auto d = tape.grad_buffer(pi).values();
        const double k = 2.0 * g[0] / n;
        for (std::size_t i = 0; i < d.size(); ++i) d[i] += k * (p[i] - t[i]);
      });
}

Var softmax_cross_entropy(Var logits, std::span<const int> labels) {
  const Tensor& z = logits.value();
  require_2d(z, "softmax_cross_entropy");
  if (labels.size() != z.rows()) {
    throw ShapeError("softmax_cross_entropy: " + std::to_string(labels.size()) +
                     " labels for " + std::to_string(z.rows()) + " rows");
  }
  Tensor probs = softmax_rows(z);
  double total = 0.0;
  for (std::size_t r = 0; r < z.rows(); ++r) {
    const int k = labels[r];
    if (k < 0 || static_cast<std::size_t>(k) >= z.cols()) {
      throw ShapeError("softmax_cross_entropy: label out of range");
    }
    total += logsumexp(z.row(r)) - z.at(r, static_cast<std::size_t>(k));
  }
  const double n = static_cast<double>(z.rows());
  const auto li = logits.index();
  std::vector<int> owned(labels.begin(), labels.end());
  return logits.tape().record(
      Tensor::scalar(total / n), {logits},
      [li, probs = std::move(probs), owned = std::move(owned), n](
          Tape& tape, const Tensor&, const Tensor& g) {
        Tensor& d = tape.grad_buffer(li);
        const double k = g[0] / n;
        for (std::size_t r = 0; r < probs.rows(); ++r) {
          auto dst = d.row(r);
          const auto p = probs.row(r);
          for (std::size_t c = 0; c < dst.size(); ++c) {
            const double onehot = static_cast<int>(c) == owned[r] ? 1.0 : 0.0;
            dst[c] += k * (p[c] - onehot);
          }
        }
      });
}

Var conv1d(Var input, Var kernel, Var bias) {
  require_same_tape(input, kernel);
  require_same_tape(input, bias);
  const Tensor& x = input.value();
  const Tensor& w = kernel.value();
  const Tensor& b = bias.value();
  if (x.rank() != 3 || w.rank() != 3) {
    throw ShapeError("conv1d: expected input [batch, length, channels] and kernel "
                     "[filters, channels, width]");
  }
  const std::size_t batch = x.dim(0), length = x.dim(1), channels = x.dim(2);
  const std::size_t filters = w.dim(0), width = w.dim(2);
  if (w.dim(1) != channels) throw ShapeError("conv1d: channel mismatch");
  if (b.size() != filters) throw ShapeError("conv1d: bias size mismatch");
  if (width == 0 || width > length) {
    throw ShapeError("conv1d: kernel width " + std::to_string(width) +
                     " exceeds input length " + std::to_string(length));
  }
  const std::size_t out_len = length - width + 1;

  // Kernel re-laid out as [channels][width][filters] so the innermost loop
  // runs over contiguous filters.
  auto kernel_at = [&](const Tensor& k, std::size_t f, std::size_t c, std::size_t j) {
    return k[(f * channels + c) * width + j];
  };
  std::vector<double> packed(channels * width * filters);
  for (std::size_t f = 0; f < filters; ++f)
    for (std::size_t c = 0; c < channels; ++c)
      for (std::size_t j = 0; j < width; ++j)
        packed[(c * width + j) * filters + f] = kernel_at(w, f, c, j);

  Tensor out({batch, out_len, filters});
  for (std::size_t n = 0; n < batch; ++n) {
    double* ob = out.data() + n * out_len * filters;
    for (std::size_t p = 0; p < out_len; ++p) {
      for (std::size_t f = 0; f < filters; ++f) ob[p * filters + f] = b[f];
    }
    const double* xb = x.data() + n * length * channels;
    for (std::size_t l = 0; l < length; ++l) {
      for (std::size_t c = 0; c < channels; ++c) {
        const double v = xb[l * channels + c];
        if (v == 0.0) continue;
        // input position l contributes to outputs p = l - j for j in [0, width)
        for (std::size_t j = 0; j < width; ++j) {
          if (j > l || l - j >= out_len) continue;
          double* dst = ob + (l - j) * filters;
          const double* kw = packed.data() + (c * width + j) * filters;
          for (std::size_t f = 0; f < filters; ++f) dst[f] += v * kw[f];
        }
      }
    }
  }

  const auto xi = input.index(), wi = kernel.index(), bi = bias.index();
  return input.tape().record(
      std::move(out), {input, kernel, bias},
      [=, packed = std::move(packed)](Tape& tape, const Tensor&, const Tensor& g) {
        const Tensor& xv = tape.value(xi);
        if (tape.requires_grad(bi)) {
          auto db = tape.grad_buffer(bi).values();
          for (std::size_t i = 0; i < batch * out_len; ++i)
            for (std::size_t f = 0; f < filters; ++f) db[f] += g[i * filters + f];
        }
        if (tape.requires_grad(wi)) {
          Tensor& dw = tape.grad_buffer(wi);
          for (std::size_t n = 0; n < batch; ++n) {
            const double* xb = xv.data() + n * length * channels;
            const double* gb = g.data() + n * out_len * filters;
            for (std::size_t l = 0; l < length; ++l) {
              for (std::size_t c = 0; c < channels; ++c) {
                const double v = xb[l * channels + c];
                if (v == 0.0) continue;
                for (std::size_t j = 0; j < width; ++j) {
                  if (j > l || l - j >= out_len) continue;
                  const double* gp = gb + (l - j) * filters;
                  for (std::size_t f = 0; f < filters; ++f)
                    dw[(f * channels + c) * width + j] += v * gp[f];
                }
              }
            }
          }
        }
        if (tape.requires_grad(xi)) {
          Tensor& dx = tape.grad_buffer(xi);
          for (std::size_t n = 0; n < batch; ++n) {
            double* db = dx.data() + n * length * channels;
            const double* gb = g.data() + n * out_len * filters;
            for (std::size_t l = 0; l < length; ++l) {
              for (std::size_t c = 0; c < channels; ++c) {
                double acc = 0.0;
                for (std::size_t j = 0; j < width; ++j) {
                  if (j > l || l - j >= out_len) continue;
                  const double* gp = gb + (l - j) * filters;
                  const double* kw = packed.data() + (c * width + j) * filters;
                  for (std::size_t f = 0; f < filters; ++f) acc += gp[f] * kw[f];
                }
                db[l * channels + c] += acc;
              }
            }
          }
        }
      });
}

double logsumexp(std::span<const double> values) {
  if (values.empty()) return -std::numeric_limits<double>::infinity();
  const double hi = *std::max_element(values.begin(), values.end());
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - hi);
  return hi + std::log(acc);
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> out(logits.size());
  if (logits.empty()) return out;
  const double hi = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - hi);
    total += out[i];
  }
  for (double& p : out) p /= total;
  return out;
}

Tensor softmax_rows(const Tensor& logits) {
  Tensor out(logits.shape());
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    const auto p = softmax(logits.row(r));
    std::copy(p.begin(), p.end(), out.row(r).begin());
  }
  return out;
}

namespace {
double logistic(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}
}  // namespace

Var lstm_cell(Var pre, Var c_prev) {
  require_same_tape(pre, c_prev);
  const Tensor& pv = pre.value();
  const Tensor& cv = c_prev.value();
  require_2d(pv, "lstm_cell");
  require_2d(cv, "lstm_cell");
  const std::size_t batch = pv.rows();
  const std::size_t hidden = cv.cols();
  if (pv.cols() != 4 * hidden || cv.rows() != batch) {
    throw ShapeError("lstm_cell: expected pre [B,4H] and c [B,H], got " +
                     shape_string(pv.shape()) + " and " + shape_string(cv.shape()));
  }
  Tensor out = Tensor::matrix(batch, 2 * hidden);
  for (std::size_t r = 0; r < batch; ++r) {
    const auto p = pv.row(r);
    const auto c0 = cv.row(r);
    auto o = out.row(r);
    for (std::size_t j = 0; j < hidden; ++j) {
      const double c = logistic(p[hidden + j]) * c0[j] +
                       logistic(p[j]) * std::tanh(p[2 * hidden + j]);
      o[hidden + j] = c;
      o[j] = logistic(p[3 * hidden + j]) * std::tanh(c);
    }
  }
  const auto pi = pre.index();
  const auto ci = c_prev.index();
  return pre.tape().record(
      std::move(out), {pre, c_prev},
      [pi, ci, batch, hidden](Tape& tape, const Tensor& y, const Tensor& g) {
        const bool want_pre = tape.requires_grad(pi);
        const bool want_c = tape.requires_grad(ci);
        Tensor* dpre = want_pre ? &tape.grad_buffer(pi) : nullptr;
        Tensor* dc = want_c ? &tape.grad_buffer(ci) : nullptr;
        const Tensor& pv = tape.value(pi);
        const Tensor& cv = tape.value(ci);
        for (std::size_t r = 0; r < batch; ++r) {
          const auto p = pv.row(r);
          const auto c0 = cv.row(r);
          const auto yr = y.row(r);
          const auto gr = g.row(r);
          for (std::size_t j = 0; j < hidden; ++j) {
            const double i = logistic(p[j]);
            const double f = logistic(p[hidden + j]);
            const double gg = std::tanh(p[2 * hidden + j]);
            const double o = logistic(p[3 * hidden + j]);
            const double tc = std::tanh(yr[hidden + j]);
            const double gh = gr[j];
            const double gc = gr[hidden + j] + gh * o * (1.0 - tc * tc);
            if (dpre) {
              auto d = dpre->row(r);
              d[j] += gc * gg * i * (1.0 - i);
              d[hidden + j] += gc * c0[j] * f * (1.0 - f);
              d[2 * hidden + j] += gc * i * (1.0 - gg * gg);
              d[3 * hidden + j] += gh * tc * o * (1.0 - o);
            }
            if (dc) dc->row(r)[j] += gc * f;
          }
        }
      });
}

}  // namespace topicsent::ag

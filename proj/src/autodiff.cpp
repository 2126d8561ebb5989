// Copyright 2026 The seltext Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "seltext/autodiff.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>
#include <utility>

namespace seltext::ad {
namespace {

// Creates the output node. The backward closure is kept only when some
// parent needs a gradient.
Var MakeNode(Tensor value, std::vector<std::shared_ptr<Node>> parents,
             std::function<void(Node&)> backward) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  for (const auto& p : parents) {
    if (p->requires_grad) node->requires_grad = true;
  }
  if (node->requires_grad) {
    node->parents = std::move(parents);
    node->backward = std::move(backward);
  }
  return Var::FromNode(std::move(node));
}

void RequireSameShape(const Var& a, const Var& b, const char* op) {
  if (!a.value().SameShape(b.value())) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch " +
                                a.value().ShapeString() + " vs " +
                                b.value().ShapeString());
  }
}

void RequireRank(const Var& v, int rank, const char* op) {
  if (v.value().rank() != rank) {
    throw std::invalid_argument(std::string(op) + ": expected rank " +
                                std::to_string(rank) + ", got " +
                                v.value().ShapeString());
  }
}

template <typename Fn, typename Deriv>
Var Elementwise(const Var& x, Fn fn, Deriv deriv) {
  Tensor out = x.value();
  for (double& v : out.values()) v = fn(v);
  return MakeNode(std::move(out), {x.node()}, [deriv](Node& self) {
    Node& in = *self.parents[0];
    if (!in.requires_grad) return;
    Tensor& g = in.Grad();
    for (std::size_t i = 0; i < g.size(); ++i) {
      g[i] += self.grad[i] * deriv(in.value[i], self.value[i]);
    }
  });
}

}  // namespace

Tensor& Node::Grad() {
  if (grad.size() != value.size() || !grad.SameShape(value)) {
    grad = Tensor(value.shape(), 0.0);
  }
  return grad;
}

Var Var::Constant(Tensor value) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  return FromNode(std::move(node));
}

Var Var::Leaf(Tensor value) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  node->requires_grad = true;
  return FromNode(std::move(node));
}

Var Var::FromNode(std::shared_ptr<Node> node) {
  Var v;
  v.node_ = std::move(node);
  return v;
}

double Var::item() const {
  if (value().size() != 1) {
    throw std::invalid_argument("item() on tensor of shape " +
                                value().ShapeString());
  }
  return value()[0];
}

void Backward(const Var& root) {
  if (root.value().size() != 1) {
    throw std::invalid_argument("Backward requires a one-element root");
  }
  if (!root.requires_grad()) return;

  // Iterative post-order DFS gives a topological order of the tape.
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  std::vector<std::pair<Node*, std::size_t>> stack{{root.node().get(), 0}};
  visited.insert(root.node().get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node* parent = node->parents[next++].get();
      if (parent->requires_grad && visited.insert(parent).second) {
        stack.emplace_back(parent, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  root.node()->Grad()[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* node = *it;
    if (node->backward && node->grad.size() == node->value.size()) {
      node->backward(*node);
    }
  }
}

Var Conv2d(const Var& x, const Var& weight, const Var& bias, int stride,
           int pad) {
  RequireRank(x, 3, "Conv2d");
  RequireRank(weight, 4, "Conv2d");
  const Tensor& in = x.value();
  const Tensor& w = weight.value();
  const int channels = in.dim(0), height = in.dim(1), width = in.dim(2);
  const int outs = w.dim(0), k = w.dim(2);
  if (w.dim(1) != channels || w.dim(3) != k) {
    throw std::invalid_argument("Conv2d: kernel " + w.ShapeString() +
                                " incompatible with input " + in.ShapeString());
  }
  if (bias.value().size() != static_cast<std::size_t>(outs)) {
    throw std::invalid_argument("Conv2d: bias size mismatch");
  }
  const int out_h = (height + 2 * pad - k) / stride + 1;
  const int out_w = (width + 2 * pad - k) / stride + 1;
  if (height + 2 * pad < k || width + 2 * pad < k || out_h < 1 || out_w < 1) {
    throw std::invalid_argument("Conv2d: input " + in.ShapeString() +
                                " too small for kernel " + std::to_string(k));
  }

  Tensor out = Tensor::Chw(outs, out_h, out_w);
  for (int o = 0; o < outs; ++o) {
    const double b = bias.value()[o];
    for (int y = 0; y < out_h; ++y) {
      for (int xo = 0; xo < out_w; ++xo) out.at(o, y, xo) = b;
    }
    for (int c = 0; c < channels; ++c) {
      for (int ky = 0; ky < k; ++ky) {
        for (int kx = 0; kx < k; ++kx) {
          const double wv = w[((static_cast<std::size_t>(o) * channels + c) * k + ky) * k + kx];
          for (int y = 0; y < out_h; ++y) {
            const int iy = y * stride + ky - pad;
            if (iy < 0 || iy >= height) continue;
            const double* row = &in.data()[(static_cast<std::size_t>(c) * height + iy) * width];
            double* orow = &out.data()[(static_cast<std::size_t>(o) * out_h + y) * out_w];
            for (int xo = 0; xo < out_w; ++xo) {
              const int ix = xo * stride + kx - pad;
              if (ix < 0 || ix >= width) continue;
              orow[xo] += wv * row[ix];
            }
          }
        }
      }
    }
  }

  return MakeNode(
      std::move(out), {x.node(), weight.node(), bias.node()},
      [=](Node& self) {
        Node& xn = *self.parents[0];
        Node& wn = *self.parents[1];
        Node& bn = *self.parents[2];
        const Tensor& in = xn.value;
        const Tensor& w = wn.value;
        const Tensor& g = self.grad;
        Tensor* gx = xn.requires_grad ? &xn.Grad() : nullptr;
        Tensor* gw = wn.requires_grad ? &wn.Grad() : nullptr;
        if (bn.requires_grad) {
          Tensor& gb = bn.Grad();
          for (int o = 0; o < outs; ++o) {
            double s = 0.0;
            for (int y = 0; y < out_h; ++y) {
              for (int xo = 0; xo < out_w; ++xo) s += g.at(o, y, xo);
            }
            gb[o] += s;
          }
        }
        if (!gx && !gw) return;
        for (int o = 0; o < outs; ++o) {
          for (int c = 0; c < channels; ++c) {
            for (int ky = 0; ky < k; ++ky) {
              for (int kx = 0; kx < k; ++kx) {
                const std::size_t widx =
                    ((static_cast<std::size_t>(o) * channels + c) * k + ky) * k + kx;
                const double wv = w[widx];
                double acc = 0.0;
                for (int y = 0; y < out_h; ++y) {
                  const int iy = y * stride + ky - pad;
                  if (iy < 0 || iy >= height) continue;
                  const std::size_t irow = (static_cast<std::size_t>(c) * height + iy) * width;
                  const double* grow = &g.data()[(static_cast<std::size_t>(o) * out_h + y) * out_w];
                  for (int xo = 0; xo < out_w; ++xo) {
                    const int ix = xo * stride + kx - pad;
                    if (ix < 0 || ix >= width) continue;
                    if (gx) (*gx)[irow + ix] += wv * grow[xo];
                    acc += in[irow + ix] * grow[xo];
                  }
                }
                if (gw) (*gw)[widx] += acc;
              }
            }
          }
        }
      });
}

Var Relu(const Var& x) {
  return Elementwise(
      x, [](double v) { return v > 0.0 ? v : 0.0; },
      [](double in, double) { return in > 0.0 ? 1.0 : 0.0; });
}

Var ShiftedSoftplus(const Var& x) {
  static const double kLog2 = std::log(2.0);
  return Elementwise(
      x,
      [](double v) {
        // Stable log(1 + e^v).
        const double sp = v > 0.0 ? v + std::log1p(std::exp(-v))
                                  : std::log1p(std::exp(v));
        return sp - kLog2;
      },
      [](double in, double) { return 1.0 / (1.0 + std::exp(-in)); });
}

Var Sigmoid(const Var& x) {
  return Elementwise(
      x, [](double v) { return 1.0 / (1.0 + std::exp(-v)); },
      [](double, double out) { return out * (1.0 - out); });
}

Var InstanceNorm(const Var& x, const Var& scale, const Var& shift, double eps) {
  RequireRank(x, 3, "InstanceNorm");
  const Tensor& in = x.value();
  const int channels = in.dim(0);
  const std::size_t plane = static_cast<std::size_t>(in.dim(1)) * in.dim(2);
  if (scale.value().size() != static_cast<std::size_t>(channels) ||
      shift.value().size() != static_cast<std::size_t>(channels)) {
    throw std::invalid_argument("InstanceNorm: scale/shift length mismatch");
  }
  if (plane == 0) throw std::invalid_argument("InstanceNorm: empty plane");

  Tensor out(in.shape());
  // Normalized values and 1/sqrt(var + eps), needed by the backward pass.
  auto xhat = std::make_shared<Tensor>(in.shape());
  auto inv_std = std::make_shared<std::vector<double>>(channels);
  for (int c = 0; c < channels; ++c) {
    const double* p = in.data() + c * plane;
    double mean = 0.0;
    for (std::size_t i = 0; i < plane; ++i) mean += p[i];
    mean /= static_cast<double>(plane);
    double var = 0.0;
    for (std::size_t i = 0; i < plane; ++i) var += (p[i] - mean) * (p[i] - mean);
    var /= static_cast<double>(plane);
    const double inv = 1.0 / std::sqrt(var + eps);
    (*inv_std)[c] = inv;
    const double a = scale.value()[c], b = shift.value()[c];
    for (std::size_t i = 0; i < plane; ++i) {
      const double h = (p[i] - mean) * inv;
      (*xhat)[c * plane + i] = h;
      out[c * plane + i] = h * a + b;
    }
  }

  return MakeNode(
      std::move(out), {x.node(), scale.node(), shift.node()},
      [=](Node& self) {
        Node& xn = *self.parents[0];
        Node& sn = *self.parents[1];
        Node& bn = *self.parents[2];
        const Tensor& g = self.grad;
        const double n = static_cast<double>(plane);
        for (int c = 0; c < channels; ++c) {
          const double a = sn.value[c];
          double sum_g = 0.0, sum_gh = 0.0;
          for (std::size_t i = 0; i < plane; ++i) {
            sum_g += g[c * plane + i];
            sum_gh += g[c * plane + i] * (*xhat)[c * plane + i];
          }
          if (sn.requires_grad) sn.Grad()[c] += sum_gh;
          if (bn.requires_grad) bn.Grad()[c] += sum_g;
          if (xn.requires_grad) {
            Tensor& gx = xn.Grad();
            // d xhat = a * g;  dx = inv/n * (n*dxhat - sum(dxhat) - xhat*sum(dxhat*xhat))
            const double k = a * (*inv_std)[c] / n;
            for (std::size_t i = 0; i < plane; ++i) {
              gx[c * plane + i] += k * (n * g[c * plane + i] - sum_g -
                                        (*xhat)[c * plane + i] * sum_gh);
            }
          }
        }
      });
}

Var MixRows(const Var& table, std::span<const double> coefficients) {
  RequireRank(table, 2, "MixRows");
  const int rows = table.value().dim(0), cols = table.value().dim(1);
  if (coefficients.size() != static_cast<std::size_t>(rows)) {
    throw std::invalid_argument("MixRows: coefficient count mismatch");
  }
  std::vector<double> coeff(coefficients.begin(), coefficients.end());
  Tensor out({cols}, 0.0);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      out[c] += coeff[r] * table.value()[static_cast<std::size_t>(r) * cols + c];
    }
  }
  return MakeNode(std::move(out), {table.node()},
                  [coeff, rows, cols](Node& self) {
                    Tensor& gt = self.parents[0]->Grad();
                    for (int r = 0; r < rows; ++r) {
                      for (int c = 0; c < cols; ++c) {
                        gt[static_cast<std::size_t>(r) * cols + c] +=
                            coeff[r] * self.grad[c];
                      }
                    }
                  });
}

Var UpsampleNearest(const Var& x, int factor) {
  RequireRank(x, 3, "UpsampleNearest");
  const Tensor& in = x.value();
  const int channels = in.dim(0), height = in.dim(1), width = in.dim(2);
  Tensor out = Tensor::Chw(channels, height * factor, width * factor);
  for (int c = 0; c < channels; ++c) {
    for (int y = 0; y < height * factor; ++y) {
      for (int xo = 0; xo < width * factor; ++xo) {
        out.at(c, y, xo) = in.at(c, y / factor, xo / factor);
      }
    }
  }
  return MakeNode(std::move(out), {x.node()}, [=](Node& self) {
    Tensor& gx = self.parents[0]->Grad();
    for (int c = 0; c < channels; ++c) {
      for (int y = 0; y < height * factor; ++y) {
        for (int xo = 0; xo < width * factor; ++xo) {
          gx.at(c, y / factor, xo / factor) += self.grad.at(c, y, xo);
        }
      }
    }
  });
}

Var Add(const Var& a, const Var& b) {
  RequireSameShape(a, b, "Add");
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b.value()[i];
  return MakeNode(std::move(out), {a.node(), b.node()}, [](Node& self) {
    for (int p = 0; p < 2; ++p) {
      Node& in = *self.parents[p];
      if (!in.requires_grad) continue;
      Tensor& g = in.Grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
  });
}

Var Sub(const Var& a, const Var& b) {
  RequireSameShape(a, b, "Sub");
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b.value()[i];
  return MakeNode(std::move(out), {a.node(), b.node()}, [](Node& self) {
    for (int p = 0; p < 2; ++p) {
      Node& in = *self.parents[p];
      if (!in.requires_grad) continue;
      const double sign = p == 0 ? 1.0 : -1.0;
      Tensor& g = in.Grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += sign * self.grad[i];
    }
  });
}

Var Mul(const Var& a, const Var& b) {
  RequireSameShape(a, b, "Mul");
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b.value()[i];
  return MakeNode(std::move(out), {a.node(), b.node()}, [](Node& self) {
    Node& an = *self.parents[0];
    Node& bn = *self.parents[1];
    if (an.requires_grad) {
      Tensor& g = an.Grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * bn.value[i];
    }
    if (bn.requires_grad) {
      Tensor& g = bn.Grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * an.value[i];
    }
  });
}

Var Scale(const Var& a, double factor) {
  Tensor out = a.value();
  for (double& v : out.values()) v *= factor;
  return MakeNode(std::move(out), {a.node()}, [factor](Node& self) {
    Tensor& g = self.parents[0]->Grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += factor * self.grad[i];
  });
}

Var Gram(const Var& features, bool normalize) {
  RequireRank(features, 3, "Gram");
  const Tensor& f = features.value();
  const int channels = f.dim(0);
  const std::size_t plane = static_cast<std::size_t>(f.dim(1)) * f.dim(2);
  const double norm =
      normalize ? static_cast<double>(channels) * static_cast<double>(plane) : 1.0;
  Tensor out({channels, channels}, 0.0);
  for (int i = 0; i < channels; ++i) {
    for (int j = i; j < channels; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < plane; ++k) s += f[i * plane + k] * f[j * plane + k];
      s /= norm;
      out[static_cast<std::size_t>(i) * channels + j] = s;
      out[static_cast<std::size_t>(j) * channels + i] = s;
    }
  }
  return MakeNode(std::move(out), {features.node()}, [=](Node& self) {
    Node& fn = *self.parents[0];
    Tensor& gf = fn.Grad();
    const Tensor& g = self.grad;
    // dF = (dG + dG^T) F / norm
    for (int i = 0; i < channels; ++i) {
      for (int j = 0; j < channels; ++j) {
        const double coeff = (g[static_cast<std::size_t>(i) * channels + j] +
                              g[static_cast<std::size_t>(j) * channels + i]) / norm;
        if (coeff == 0.0) continue;
        for (std::size_t k = 0; k < plane; ++k) {
          gf[i * plane + k] += coeff * fn.value[j * plane + k];
        }
      }
    }
  });
}

Var SquaredError(const Var& a, const Var& b, Reduction reduction) {
  RequireSameShape(a, b, "SquaredError");
  const std::size_t n = a.value().size();
  const double denom =
      reduction == Reduction::kMean ? static_cast<double>(n) : 1.0;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a.value()[i] - b.value()[i];
    s += d * d;
  }
  return MakeNode(Tensor({1}, s / denom), {a.node(), b.node()},
                  [denom](Node& self) {
                    Node& an = *self.parents[0];
                    Node& bn = *self.parents[1];
                    const double k = 2.0 * self.grad[0] / denom;
                    for (std::size_t i = 0; i < an.value.size(); ++i) {
                      const double d = k * (an.value[i] - bn.value[i]);
                      if (an.requires_grad) an.Grad()[i] += d;
                      if (bn.requires_grad) bn.Grad()[i] -= d;
                    }
                  });
}

}  // namespace seltext::ad

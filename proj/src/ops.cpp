#include "rcgan/ops.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstring>

namespace rcgan {
namespace ops {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapRM = Eigen::Map<RowMat>;
using CMapRM = Eigen::Map<const RowMat>;

// cols[(c*k+ky)*k+kx, sy*sw+sx] = img(c, sy*stride-pad+ky, sx*stride-pad+kx), 0 out of bounds.
// (sh, sw) is the sliding-grid size: conv output dims for conv2d, input dims for conv_transpose2d.
void gather_cols(const Tensor& img, int k, int stride, int pad, int sh, int sw, double* cols) {
  const int ch = img.channels(), h = img.height(), w = img.width();
  const std::size_t plane = static_cast<std::size_t>(sh) * sw;
  for (int c = 0; c < ch; ++c) {
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        double* row = cols + (static_cast<std::size_t>(c) * k + ky) * k * plane +
                      static_cast<std::size_t>(kx) * plane;
        for (int sy = 0; sy < sh; ++sy) {
          const int iy = sy * stride - pad + ky;
          if (iy < 0 || iy >= h) {
            std::memset(row + static_cast<std::size_t>(sy) * sw, 0, sizeof(double) * sw);
            continue;
          }
          for (int sx = 0; sx < sw; ++sx) {
            const int ix = sx * stride - pad + kx;
            row[static_cast<std::size_t>(sy) * sw + sx] = (ix < 0 || ix >= w) ? 0.0 : img.at(c, iy, ix);
          }
        }
      }
    }
  }
}

// img(c, sy*stride-pad+ky, sx*stride-pad+kx) += cols[(c*k+ky)*k+kx, sy*sw+sx]
void scatter_cols(const double* cols, int channels, int k, int stride, int pad, int sh, int sw,
                  Tensor& img) {
  const int h = img.height(), w = img.width();
  const std::size_t plane = static_cast<std::size_t>(sh) * sw;
  for (int c = 0; c < channels; ++c) {
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        const double* row = cols + (static_cast<std::size_t>(c) * k + ky) * k * plane +
                            static_cast<std::size_t>(kx) * plane;
        for (int sy = 0; sy < sh; ++sy) {
          const int iy = sy * stride - pad + ky;
          if (iy < 0 || iy >= h) continue;
          for (int sx = 0; sx < sw; ++sx) {
            const int ix = sx * stride - pad + kx;
            if (ix < 0 || ix >= w) continue;
            img.at(c, iy, ix) += row[static_cast<std::size_t>(sy) * sw + sx];
          }
        }
      }
    }
  }
}

void accumulate(Node& parent, const Tensor& g) {
  Tensor& dst = parent.ensure_grad();
  const double* s = g.data();
  double* d = dst.data();
  for (std::size_t i = 0, n = g.size(); i < n; ++i) d[i] += s[i];
}

Var unary_pointwise(const Var& x, double (*f)(double), double (*df_from_y)(double, double)) {
  Tensor out(x.value().dims());
  const double* s = x.value().data();
  double* d = out.data();
  for (std::size_t i = 0, n = out.size(); i < n; ++i) d[i] = f(s[i]);
  auto node = make_node(std::move(out), {x.node()});
  node->backprop = [df_from_y](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    Tensor& dst = p.ensure_grad();
    for (std::size_t i = 0, n = self.value.size(); i < n; ++i)
      dst[i] += self.grad[i] * df_from_y(self.value[i], p.value[i]);
  };
  return Var(node);
}

}  // namespace

Var conv2d(const Var& x, const Var& w, const Var& b, int stride, int pad) {
  const Tensor& xv = x.value();
  const Tensor& wv = w.value();
  if (xv.rank() != 3 || wv.rank() != 4) throw ShapeError("conv2d: expects (c,h,w) and (oc,ic,k,k)");
  const int ic = xv.channels(), h = xv.height(), wd = xv.width();
  const int oc = wv.dim(0), k = wv.dim(2);
  if (wv.dim(1) != ic) throw ShapeError("conv2d: weight input channels mismatch");
  if (wv.dim(3) != k) throw ShapeError("conv2d: kernel must be square");
  if (b.value().size() != static_cast<std::size_t>(oc)) throw ShapeError("conv2d: bias size");
  const int oh = (h + 2 * pad - k) / stride + 1;
  const int ow = (wd + 2 * pad - k) / stride + 1;
  if (oh < 1 || ow < 1) throw ShapeError("conv2d: output would be empty");

  const std::size_t ick2 = static_cast<std::size_t>(ic) * k * k;
  const std::size_t ohow = static_cast<std::size_t>(oh) * ow;
  std::vector<double> cols(ick2 * ohow);
  gather_cols(xv, k, stride, pad, oh, ow, cols.data());

  Tensor out({oc, oh, ow});
  MapRM om(out.data(), oc, static_cast<Eigen::Index>(ohow));
  om.noalias() = CMapRM(wv.data(), oc, static_cast<Eigen::Index>(ick2)) *
                 CMapRM(cols.data(), static_cast<Eigen::Index>(ick2), static_cast<Eigen::Index>(ohow));
  for (int c = 0; c < oc; ++c) om.row(c).array() += b.value()[c];

  auto node = make_node(std::move(out), {x.node(), w.node(), b.node()});
  node->backprop = [stride, pad, k, ic, oc, oh, ow](Node& self) {
    Node& xn = *self.parents[0];
    Node& wn = *self.parents[1];
    Node& bn = *self.parents[2];
    const std::size_t ick2 = static_cast<std::size_t>(ic) * k * k;
    const std::size_t ohow = static_cast<std::size_t>(oh) * ow;
    CMapRM g(self.grad.data(), oc, static_cast<Eigen::Index>(ohow));
    if (wn.requires_grad || bn.requires_grad) {
      if (bn.requires_grad) {
        Tensor& db = bn.ensure_grad();
        for (int c = 0; c < oc; ++c) db[c] += g.row(c).sum();
      }
      if (wn.requires_grad) {
        std::vector<double> cols(ick2 * ohow);
        gather_cols(xn.value, k, stride, pad, oh, ow, cols.data());
        MapRM dw(wn.ensure_grad().data(), oc, static_cast<Eigen::Index>(ick2));
        dw.noalias() += g * CMapRM(cols.data(), static_cast<Eigen::Index>(ick2),
                                   static_cast<Eigen::Index>(ohow))
                                .transpose();
      }
    }
    if (xn.requires_grad) {
      std::vector<double> dcols(ick2 * ohow);
      MapRM dc(dcols.data(), static_cast<Eigen::Index>(ick2), static_cast<Eigen::Index>(ohow));
      dc.noalias() = CMapRM(wn.value.data(), oc, static_cast<Eigen::Index>(ick2)).transpose() * g;
      scatter_cols(dcols.data(), ic, k, stride, pad, oh, ow, xn.ensure_grad());
    }
  };
  return Var(node);
}

Var conv_transpose2d(const Var& x, const Var& w, const Var& b, int stride, int pad, int out_pad) {
  const Tensor& xv = x.value();
  const Tensor& wv = w.value();
  if (xv.rank() != 3 || wv.rank() != 4)
    throw ShapeError("conv_transpose2d: expects (c,h,w) and (ic,oc,k,k)");
  const int ic = xv.channels(), h = xv.height(), wd = xv.width();
  const int oc = wv.dim(1), k = wv.dim(2);
  if (wv.dim(0) != ic) throw ShapeError("conv_transpose2d: weight input channels mismatch");
  if (b.value().size() != static_cast<std::size_t>(oc)) throw ShapeError("conv_transpose2d: bias size");
  const int oh = (h - 1) * stride - 2 * pad + k + out_pad;
  const int ow = (wd - 1) * stride - 2 * pad + k + out_pad;
  if (oh < 1 || ow < 1) throw ShapeError("conv_transpose2d: output would be empty");

  const std::size_t ock2 = static_cast<std::size_t>(oc) * k * k;
  const std::size_t hw = static_cast<std::size_t>(h) * wd;
  std::vector<double> m(ock2 * hw);
  // m = reshape(w, ic x oc*k*k)^T * reshape(x, ic x h*w)
  MapRM mm(m.data(), static_cast<Eigen::Index>(ock2), static_cast<Eigen::Index>(hw));
  mm.noalias() = CMapRM(wv.data(), ic, static_cast<Eigen::Index>(ock2)).transpose() *
                 CMapRM(xv.data(), ic, static_cast<Eigen::Index>(hw));

  Tensor out({oc, oh, ow});
  scatter_cols(m.data(), oc, k, stride, pad, h, wd, out);
  for (int c = 0; c < oc; ++c) {
    double* p = out.data() + static_cast<std::size_t>(c) * oh * ow;
    const double bias = b.value()[c];
    for (std::size_t i = 0, n = static_cast<std::size_t>(oh) * ow; i < n; ++i) p[i] += bias;
  }

  auto node = make_node(std::move(out), {x.node(), w.node(), b.node()});
  node->backprop = [stride, pad, k, ic, oc, h, wd, oh, ow](Node& self) {
    Node& xn = *self.parents[0];
    Node& wn = *self.parents[1];
    Node& bn = *self.parents[2];
    const std::size_t ock2 = static_cast<std::size_t>(oc) * k * k;
    const std::size_t hw = static_cast<std::size_t>(h) * wd;
    if (bn.requires_grad) {
      Tensor& db = bn.ensure_grad();
      for (int c = 0; c < oc; ++c) {
        const double* p = self.grad.data() + static_cast<std::size_t>(c) * oh * ow;
        double s = 0.0;
        for (std::size_t i = 0, n = static_cast<std::size_t>(oh) * ow; i < n; ++i) s += p[i];
        db[c] += s;
      }
    }
    if (!xn.requires_grad && !wn.requires_grad) return;
    std::vector<double> dm(ock2 * hw);
    gather_cols(self.grad, k, stride, pad, h, wd, dm.data());
    CMapRM dmm(dm.data(), static_cast<Eigen::Index>(ock2), static_cast<Eigen::Index>(hw));
    if (xn.requires_grad) {
      MapRM dx(xn.ensure_grad().data(), ic, static_cast<Eigen::Index>(hw));
      dx.noalias() += CMapRM(wn.value.data(), ic, static_cast<Eigen::Index>(ock2)) * dmm;
    }
    if (wn.requires_grad) {
      MapRM dw(wn.ensure_grad().data(), ic, static_cast<Eigen::Index>(ock2));
      dw.noalias() += CMapRM(xn.value.data(), ic, static_cast<Eigen::Index>(hw)) * dmm.transpose();
    }
  };
  return Var(node);
}

Var avg_pool2(const Var& x) {
  const Tensor& xv = x.value();
  if (xv.rank() != 3) throw ShapeError("avg_pool2: expects (c,h,w)");
  const int ch = xv.channels(), h = xv.height(), w = xv.width();
  if (h % 2 != 0 || w % 2 != 0) throw ShapeError("avg_pool2: spatial dims must be even");
  Tensor out({ch, h / 2, w / 2});
  for (int c = 0; c < ch; ++c)
    for (int y = 0; y < h / 2; ++y)
      for (int ix = 0; ix < w / 2; ++ix)
        out.at(c, y, ix) = 0.25 * (xv.at(c, 2 * y, 2 * ix) + xv.at(c, 2 * y, 2 * ix + 1) +
                                   xv.at(c, 2 * y + 1, 2 * ix) + xv.at(c, 2 * y + 1, 2 * ix + 1));
  auto node = make_node(std::move(out), {x.node()});
  node->backprop = [ch, h, w](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    Tensor& dx = p.ensure_grad();
    for (int c = 0; c < ch; ++c)
      for (int y = 0; y < h / 2; ++y)
        for (int ix = 0; ix < w / 2; ++ix) {
          const double g = 0.25 * self.grad.at(c, y, ix);
          dx.at(c, 2 * y, 2 * ix) += g;
          dx.at(c, 2 * y, 2 * ix + 1) += g;
          dx.at(c, 2 * y + 1, 2 * ix) += g;
          dx.at(c, 2 * y + 1, 2 * ix + 1) += g;
        }
  };
  return Var(node);
}

Var relu(const Var& x) {
  return unary_pointwise(
      x, [](double v) { return v > 0.0 ? v : 0.0; },
      [](double, double xi) { return xi > 0.0 ? 1.0 : 0.0; });
}

Var leaky_relu(const Var& x, double slope) {
  Tensor out(x.value().dims());
  const double* s = x.value().data();
  double* d = out.data();
  for (std::size_t i = 0, n = out.size(); i < n; ++i) d[i] = s[i] > 0.0 ? s[i] : slope * s[i];
  auto node = make_node(std::move(out), {x.node()});
  node->backprop = [slope](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    Tensor& dst = p.ensure_grad();
    for (std::size_t i = 0, n = self.value.size(); i < n; ++i)
      dst[i] += self.grad[i] * (p.value[i] > 0.0 ? 1.0 : slope);
  };
  return Var(node);
}

Var sigmoid(const Var& x) {
  return unary_pointwise(
      x, [](double v) { return 1.0 / (1.0 + std::exp(-v)); },
      [](double y, double) { return y * (1.0 - y); });
}

Var tanh(const Var& x) {
  return unary_pointwise(
      x, [](double v) { return std::tanh(v); }, [](double y, double) { return 1.0 - y * y; });
}

Var abs(const Var& x) {
  return unary_pointwise(
      x, [](double v) { return std::fabs(v); },
      [](double, double xi) { return xi > 0.0 ? 1.0 : (xi < 0.0 ? -1.0 : 0.0); });
}

Var square(const Var& x) {
  return unary_pointwise(
      x, [](double v) { return v * v; }, [](double, double xi) { return 2.0 * xi; });
}

Var add(const Var& a, const Var& b) {
  check_same_dims(a.value(), b.value(), "add");
  Tensor out(a.value().dims());
  for (std::size_t i = 0, n = out.size(); i < n; ++i) out[i] = a.value()[i] + b.value()[i];
  auto node = make_node(std::move(out), {a.node(), b.node()});
  node->backprop = [](Node& self) {
    for (auto& p : self.parents)
      if (p->requires_grad) accumulate(*p, self.grad);
  };
  return Var(node);
}

Var sub(const Var& a, const Var& b) {
  check_same_dims(a.value(), b.value(), "sub");
  Tensor out(a.value().dims());
  for (std::size_t i = 0, n = out.size(); i < n; ++i) out[i] = a.value()[i] - b.value()[i];
  auto node = make_node(std::move(out), {a.node(), b.node()});
  node->backprop = [](Node& self) {
    Node& a = *self.parents[0];
    Node& b = *self.parents[1];
    if (a.requires_grad) accumulate(a, self.grad);
    if (b.requires_grad) {
      Tensor& dst = b.ensure_grad();
      for (std::size_t i = 0, n = self.grad.size(); i < n; ++i) dst[i] -= self.grad[i];
    }
  };
  return Var(node);
}

Var mul(const Var& a, const Var& b) {
  check_same_dims(a.value(), b.value(), "mul");
  Tensor out(a.value().dims());
  for (std::size_t i = 0, n = out.size(); i < n; ++i) out[i] = a.value()[i] * b.value()[i];
  auto node = make_node(std::move(out), {a.node(), b.node()});
  node->backprop = [](Node& self) {
    Node& a = *self.parents[0];
    Node& b = *self.parents[1];
    if (a.requires_grad) {
      Tensor& dst = a.ensure_grad();
      for (std::size_t i = 0, n = self.grad.size(); i < n; ++i) dst[i] += self.grad[i] * b.value[i];
    }
    if (b.requires_grad) {
      Tensor& dst = b.ensure_grad();
      for (std::size_t i = 0, n = self.grad.size(); i < n; ++i) dst[i] += self.grad[i] * a.value[i];
    }
  };
  return Var(node);
}

Var scale(const Var& x, double s) {
  Tensor out(x.value().dims());
  for (std::size_t i = 0, n = out.size(); i < n; ++i) out[i] = x.value()[i] * s;
  auto node = make_node(std::move(out), {x.node()});
  node->backprop = [s](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    Tensor& dst = p.ensure_grad();
    for (std::size_t i = 0, n = self.grad.size(); i < n; ++i) dst[i] += self.grad[i] * s;
  };
  return Var(node);
}

Var add_const(const Var& x, double c) {
  Tensor out(x.value().dims());
  for (std::size_t i = 0, n = out.size(); i < n; ++i) out[i] = x.value()[i] + c;
  auto node = make_node(std::move(out), {x.node()});
  node->backprop = [](Node& self) {
    Node& p = *self.parents[0];
    if (p.requires_grad) accumulate(p, self.grad);
  };
  return Var(node);
}

Var concat_ch(const std::vector<Var>& xs) {
  if (xs.empty()) throw ShapeError("concat_ch: empty input list");
  const int h = xs[0].value().height(), w = xs[0].value().width();
  int ch = 0;
  std::vector<std::shared_ptr<Node>> parents;
  for (const Var& v : xs) {
    if (v.value().rank() != 3 || v.value().height() != h || v.value().width() != w)
      throw ShapeError("concat_ch: spatial dims mismatch");
    ch += v.value().channels();
    parents.push_back(v.node());
  }
  Tensor out({ch, h, w});
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  std::size_t off = 0;
  for (const Var& v : xs) {
    std::memcpy(out.data() + off, v.value().data(), v.value().size() * sizeof(double));
    off += v.value().size();
  }
  auto node = make_node(std::move(out), std::move(parents));
  node->backprop = [plane](Node& self) {
    std::size_t off = 0;
    for (auto& p : self.parents) {
      const std::size_t n = p->value.size();
      if (p->requires_grad) {
        Tensor& dst = p->ensure_grad();
        for (std::size_t i = 0; i < n; ++i) dst[i] += self.grad[off + i];
      }
      off += n;
    }
    (void)plane;
  };
  return Var(node);
}

Var slice_ch(const Var& x, int c0, int c1) {
  const Tensor& xv = x.value();
  if (xv.rank() != 3 || c0 < 0 || c1 > xv.channels() || c0 >= c1)
    throw ShapeError("slice_ch: bad channel range");
  const int h = xv.height(), w = xv.width();
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  Tensor out({c1 - c0, h, w});
  std::memcpy(out.data(), xv.data() + static_cast<std::size_t>(c0) * plane,
              out.size() * sizeof(double));
  auto node = make_node(std::move(out), {x.node()});
  node->backprop = [c0, plane](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    Tensor& dst = p.ensure_grad();
    double* base = dst.data() + static_cast<std::size_t>(c0) * plane;
    for (std::size_t i = 0, n = self.grad.size(); i < n; ++i) base[i] += self.grad[i];
  };
  return Var(node);
}

Var repeat_ch(const Var& x, int n) {
  const Tensor& xv = x.value();
  if (xv.rank() != 3 || xv.channels() != 1) throw ShapeError("repeat_ch: expects (1,h,w)");
  const std::size_t plane = static_cast<std::size_t>(xv.height()) * xv.width();
  Tensor out({n, xv.height(), xv.width()});
  for (int c = 0; c < n; ++c)
    std::memcpy(out.data() + static_cast<std::size_t>(c) * plane, xv.data(), plane * sizeof(double));
  auto node = make_node(std::move(out), {x.node()});
  node->backprop = [n, plane](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    Tensor& dst = p.ensure_grad();
    for (int c = 0; c < n; ++c) {
      const double* g = self.grad.data() + static_cast<std::size_t>(c) * plane;
      for (std::size_t i = 0; i < plane; ++i) dst[i] += g[i];
    }
  };
  return Var(node);
}

Var mean_all(const Var& x) {
  const std::size_t n = x.value().size();
  Tensor out = Tensor::scalar(x.value().sum() / static_cast<double>(n));
  auto node = make_node(std::move(out), {x.node()});
  node->backprop = [n](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    Tensor& dst = p.ensure_grad();
    const double g = self.grad[0] / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) dst[i] += g;
  };
  return Var(node);
}

Var add_scalars(const std::vector<Var>& xs) {
  if (xs.empty()) throw ShapeError("add_scalars: empty input list");
  double s = 0.0;
  std::vector<std::shared_ptr<Node>> parents;
  for (const Var& v : xs) {
    if (v.value().size() != 1) throw ShapeError("add_scalars: inputs must be scalars");
    s += v.value()[0];
    parents.push_back(v.node());
  }
  auto node = make_node(Tensor::scalar(s), std::move(parents));
  node->backprop = [](Node& self) {
    for (auto& p : self.parents)
      if (p->requires_grad) p->ensure_grad()[0] += self.grad[0];
  };
  return Var(node);
}

}  // namespace ops
}  // namespace rcgan

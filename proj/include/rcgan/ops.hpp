#pragma once

#include <vector>

#include "rcgan/graph.hpp"

namespace rcgan {
namespace ops {

// x: (ic,h,w), w: (oc,ic,k,k), b: (oc). Zero padding.
Var conv2d(const Var& x, const Var& w, const Var& b, int stride, int pad);

// x: (ic,h,w), w: (ic,oc,k,k), b: (oc).
// Output spatial size: (h-1)*stride - 2*pad + k + out_pad.
Var conv_transpose2d(const Var& x, const Var& w, const Var& b, int stride, int pad, int out_pad);

// 2x2 average pooling, stride 2. Spatial dims must be even.
Var avg_pool2(const Var& x);

Var relu(const Var& x);
Var leaky_relu(const Var& x, double slope);
Var sigmoid(const Var& x);
Var tanh(const Var& x);

Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);  // elementwise
Var scale(const Var& x, double s);
Var add_const(const Var& x, double c);

Var concat_ch(const std::vector<Var>& xs);
Var slice_ch(const Var& x, int c0, int c1);  // channels [c0, c1)
Var repeat_ch(const Var& x, int n);          // 1-channel -> n-channel broadcast

Var mean_all(const Var& x);  // -> scalar
Var abs(const Var& x);
Var square(const Var& x);

Var add_scalars(const std::vector<Var>& xs);  // sum of scalar Vars

}  // namespace ops
}  // namespace rcgan

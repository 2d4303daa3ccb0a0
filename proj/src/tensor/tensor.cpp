// Copyright 2026 The incodec Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "incodec/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

namespace incodec {

std::string Shape3::str() const {
  std::ostringstream os;
  os << "(" << channels << "," << height << "," << width << ")";
  return os.str();
}

std::string KernelShape::str() const {
  std::ostringstream os;
  os << "[" << out_ch << "," << in_ch << "," << kh << "," << kw << "]";
  return os.str();
}

template <class T>
BasicTensor<T>::BasicTensor(Shape3 shape, T fill) : shape_(shape) {
  if (shape.channels <= 0 || shape.height <= 0 || shape.width <= 0)
    throw ContractViolation("tensor shape must be positive, got " + shape.str());
  data_.assign(shape.size(), fill);
}

template <class T>
BasicTensor<T>::BasicTensor(Shape3 shape, std::vector<T> data)
    : shape_(shape), data_(std::move(data)) {
  if (shape.channels <= 0 || shape.height <= 0 || shape.width <= 0)
    throw ContractViolation("tensor shape must be positive, got " + shape.str());
  if (data_.size() != shape.size())
    throw ContractViolation("tensor data length " + std::to_string(data_.size()) +
                            " does not match shape " + shape.str());
}

template <class T>
bool BasicTensor<T>::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](T v) { return std::isfinite(v); });
}

template <class T>
void require_finite(const BasicTensor<T>& x, const char* what) {
  if (!x.all_finite()) throw NumericError(std::string(what) + ": non-finite value in output");
}

namespace {

bool valid_kernel_extent(int k) { return k == 1 || k == 3 || k == 5 || k == 7 || k == 9; }

void require_same_shape(const Shape3& a, const Shape3& b, const char* op) {
  if (!(a == b))
    throw ContractViolation(std::string(op) + ": shape mismatch " + a.str() + " vs " + b.str());
}

template <class T>
T dot(const T* a, const T* b, std::size_t n) {
  // Eight fixed lanes, reduced in a fixed order.
  T lane[8] = {};
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8)
    for (int k = 0; k < 8; ++k) lane[k] += a[i + k] * b[i + k];
  T tail = T(0);
  for (; i < n; ++i) tail += a[i] * b[i];
  T s = ((lane[0] + lane[1]) + (lane[2] + lane[3])) + ((lane[4] + lane[5]) + (lane[6] + lane[7]));
  return s + tail;
}

template <class T>
T dot(const T* a, std::size_t n) {
  T lane[8] = {};
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8)
    for (int k = 0; k < 8; ++k) lane[k] += a[i + k];
  T tail = T(0);
  for (; i < n; ++i) tail += a[i];
  T s = ((lane[0] + lane[1]) + (lane[2] + lane[3])) + ((lane[4] + lane[5]) + (lane[6] + lane[7]));
  return s + tail;
}


// Padded layout: rows are wp = w + kw - 1 wide with the image at (ph, pw).
// Outputs are computed at padded width over flat positions p = i*wp + j so
// each kernel tap reads one contiguous run; columns j >= w are discarded.
struct PaddedLayout {
  int h, w, ph, pw, hp, wp;
  std::size_t plane;  // hp * wp + slack for the last tap's overrun
  std::size_t span;   // h * wp
  std::size_t tiles;  // span rounded up to whole tiles

  PaddedLayout(int h_, int w_, const KernelShape& ks, std::size_t tile)
      : h(h_), w(w_), ph(ks.kh / 2), pw(ks.kw / 2), hp(h_ + 2 * (ks.kh / 2)),
        wp(w_ + 2 * (ks.kw / 2)) {
    plane = static_cast<std::size_t>(hp) * wp + 2 * pw;
    span = static_cast<std::size_t>(h) * wp;
    tiles = (span + tile - 1) / tile * tile;
  }
  std::size_t tap(int u, int v) const { return static_cast<std::size_t>(u) * wp + v; }
  // Padded buffer length for `channels` planes, readable up to tap + tiles.
  std::size_t buffer(int channels) const { return channels * plane + (tiles - span) + 64; }
};

template <class T>
struct VecOf;
template <>
struct VecOf<float> {
  typedef float type __attribute__((vector_size(64)));
};
template <>
struct VecOf<double> {
  typedef double type __attribute__((vector_size(64)));
};
template <class T>
using Vec = typename VecOf<T>::type;
template <class T>
constexpr int kLanes = static_cast<int>(64 / sizeof(T));

template <class T>
Vec<T> load(const T* p) {
  Vec<T> v;
  std::memcpy(&v, p, sizeof v);
  return v;
}

template <class T>
void store(T* p, const Vec<T>& v) {
  std::memcpy(p, &v, sizeof v);
}

template <class T>
T lane_sum(const Vec<T>& v) {
  T s = T(0);
  for (int k = 0; k < kLanes<T>; ++k) s += v[k];
  return s;
}

template <class T>
std::vector<T> pad_input(const BasicTensor<T>& x, const PaddedLayout& l) {
  std::vector<T> out(l.buffer(x.channels()), T(0));
  for (int c = 0; c < x.channels(); ++c) {
    const T* src = x.channel(c).data();
    T* dst = out.data() + c * l.plane;
    for (int i = 0; i < l.h; ++i)
      std::copy_n(src + static_cast<std::size_t>(i) * l.w, l.w,
                  dst + static_cast<std::size_t>(i + l.ph) * l.wp + l.pw);
  }
  return out;
}

// OB output channels x two vectors of positions at tile p, held in
// registers across the whole (c, u, v) reduction. `wpack` is [c][u][v][OB].
template <class T, int OB>
void conv_tile(const T* xp, const PaddedLayout& l, std::size_t p, int in_ch, int kh, int kw,
               const T* wpack, const T* bias, T* acc_out) {
  constexpr int L = kLanes<T>;
  Vec<T> acc[OB][2];
  for (int b = 0; b < OB; ++b) acc[b][0] = acc[b][1] = Vec<T>{} + bias[b];
  const T* wt = wpack;
  for (int c = 0; c < in_ch; ++c) {
    const T* src = xp + c * l.plane + p;
    for (int u = 0; u < kh; ++u)
      for (int v = 0; v < kw; ++v, wt += OB) {
        const Vec<T> s0 = load(src + l.tap(u, v));
        const Vec<T> s1 = load(src + l.tap(u, v) + L);
        for (int b = 0; b < OB; ++b) {
          acc[b][0] += wt[b] * s0;
          acc[b][1] += wt[b] * s1;
        }
      }
  }
  for (int b = 0; b < OB; ++b) {
    store(acc_out + b * l.tiles + p, acc[b][0]);
    store(acc_out + b * l.tiles + p + L, acc[b][1]);
  }
}

// out[o] = bias[o] + sum_{c,u,v} w(o,c,u,v) * xp[c][p + tap(u,v)], written
// to the interior of `out`. `w` is indexed [o][c][u][v]. Tiles are the outer
// loop so one tile's input window stays in cache for every output block.
template <class T>
void conv_core(const std::vector<T>& xp, const PaddedLayout& l, const KernelShape& ks,
               std::span<const T> w, std::span<const T> bias, BasicTensor<T>& out) {
  constexpr int OB = 8;
  const std::size_t per_out = static_cast<std::size_t>(ks.in_ch) * ks.kh * ks.kw;
  const int full = ks.out_ch / OB * OB;
  // Blocks of OB channels, then single channels; each block packed [t][b].
  std::vector<T> wpack(per_out * ks.out_ch);
  for (int o0 = 0; o0 < ks.out_ch;) {
    const int nb = o0 < full ? OB : 1;
    for (std::size_t t = 0; t < per_out; ++t)
      for (int b = 0; b < nb; ++b) wpack[o0 * per_out + t * nb + b] = w[(o0 + b) * per_out + t];
    o0 += nb;
  }
  std::vector<T> acc(ks.out_ch * l.tiles);
  for (std::size_t p = 0; p < l.tiles; p += 2 * kLanes<T>)
    for (int o0 = 0; o0 < ks.out_ch;) {
      const T* wp = wpack.data() + o0 * per_out;
      T* a = acc.data() + o0 * l.tiles;
      if (o0 < full) {
        conv_tile<T, OB>(xp.data(), l, p, ks.in_ch, ks.kh, ks.kw, wp, bias.data() + o0, a);
        o0 += OB;
      } else {
        conv_tile<T, 1>(xp.data(), l, p, ks.in_ch, ks.kh, ks.kw, wp, bias.data() + o0, a);
        o0 += 1;
      }
    }
  for (int o = 0; o < ks.out_ch; ++o) {
    T* dst = out.channel(o).data();
    for (int i = 0; i < l.h; ++i)
      std::copy_n(acc.data() + o * l.tiles + static_cast<std::size_t>(i) * l.wp, l.w,
                  dst + static_cast<std::size_t>(i) * l.w);
  }
}

// grad_w(o, c, u, v) = sum_p gop[o][p] * xp[c][p + tap(u,v)] for one (c, u)
// and OB output channels, lanes reduced in a fixed order.
template <class T, int OB>
void weight_grad_row(const T* const* gop, const T* src, const PaddedLayout& l, int kw,
                     T* gw, std::size_t stride) {
  constexpr int L = kLanes<T>;
  constexpr int KW = 9;
  Vec<T> acc[OB][KW];
  for (int b = 0; b < OB; ++b)
    for (int v = 0; v < kw; ++v) acc[b][v] = Vec<T>{};
  for (std::size_t p = 0; p < l.tiles; p += L) {
    Vec<T> g[OB];
    for (int b = 0; b < OB; ++b) g[b] = load(gop[b] + p);
    for (int v = 0; v < kw; ++v) {
      const Vec<T> s = load(src + p + v);
      for (int b = 0; b < OB; ++b) acc[b][v] += g[b] * s;
    }
  }
  for (int b = 0; b < OB; ++b)
    for (int v = 0; v < kw; ++v) gw[b * stride + v] = lane_sum<T>(acc[b][v]);
}

constexpr int kGradBlock = 4;

// 1x1 kernels: grad_w is G * X^T over positions; 4x4 (o, c) register tiles.
template <class T>
void weight_grad_1x1(const T* gop, const T* xp, const PaddedLayout& l, int out_ch, int in_ch,
                     T* gw) {
  constexpr int L = kLanes<T>;
  constexpr int B = 4;
  for (int o0 = 0; o0 < out_ch; o0 += B)
    for (int c0 = 0; c0 < in_ch; c0 += B) {
      const int no = std::min(B, out_ch - o0), nc = std::min(B, in_ch - c0);
      Vec<T> acc[B][B];
      for (int a = 0; a < B; ++a)
        for (int b = 0; b < B; ++b) acc[a][b] = Vec<T>{};
      for (std::size_t p = 0; p < l.tiles; p += L) {
        Vec<T> g[B], x[B];
        for (int a = 0; a < B; ++a) g[a] = load(gop + std::min(o0 + a, out_ch - 1) * l.tiles + p);
        for (int b = 0; b < B; ++b) x[b] = load(xp + std::min(c0 + b, in_ch - 1) * l.plane + p);
        for (int a = 0; a < B; ++a)
          for (int b = 0; b < B; ++b) acc[a][b] += g[a] * x[b];
      }
      for (int a = 0; a < no; ++a)
        for (int b = 0; b < nc; ++b)
          gw[static_cast<std::size_t>(o0 + a) * in_ch + c0 + b] = lane_sum<T>(acc[a][b]);
    }
}

}  // namespace

template <class T>
void validate_kernel(const KernelRef<T>& k) {
  const KernelShape& s = k.shape;
  if (s.out_ch <= 0 || s.in_ch <= 0)
    throw ContractViolation("kernel channel counts must be positive, got " + s.str());
  if (!valid_kernel_extent(s.kh) || !valid_kernel_extent(s.kw))
    throw ContractViolation("kernel extent must be one of 1,3,5,7,9, got " + s.str());
  if (k.weights.size() != s.weight_count())
    throw ContractViolation("kernel " + s.str() + " expects " + std::to_string(s.weight_count()) +
                            " weights, got " + std::to_string(k.weights.size()));
  if (k.bias.size() != static_cast<std::size_t>(s.out_ch))
    throw ContractViolation("kernel " + s.str() + " expects " + std::to_string(s.out_ch) +
                            " biases, got " + std::to_string(k.bias.size()));
}

template <class T>
BasicTensor<T> conv2d_same(const BasicTensor<T>& x, const KernelRef<T>& k) {
  validate_kernel(k);
  const KernelShape& ks = k.shape;
  if (x.channels() != ks.in_ch)
    throw ContractViolation("conv2d_same: input " + x.shape().str() + " does not match kernel " +
                            ks.str());
  const PaddedLayout l(x.height(), x.width(), ks, 2 * kLanes<T>);
  BasicTensor<T> out(ks.out_ch, l.h, l.w);
  conv_core(pad_input(x, l), l, ks, k.weights, k.bias, out);
  require_finite(out, "conv2d_same");
  return out;
}

template <class T>
BasicGradBundle<T> conv2d_backward(const BasicTensor<T>& x, const KernelRef<T>& k,
                                   const BasicTensor<T>& grad_out) {
  validate_kernel(k);
  const KernelShape& ks = k.shape;
  if (x.channels() != ks.in_ch)
    throw ContractViolation("conv2d_backward: input " + x.shape().str() +
                            " does not match kernel " + ks.str());
  require_same_shape(grad_out.shape(), Shape3{ks.out_ch, x.height(), x.width()},
                     "conv2d_backward");
  const PaddedLayout l(x.height(), x.width(), ks, 2 * kLanes<T>);
  const std::vector<T> xp = pad_input(x, l);
  const std::size_t taps = static_cast<std::size_t>(ks.kh) * ks.kw;
  const std::size_t stride = ks.in_ch * taps;

  // grad_out at padded width, zero in the pad columns and past the span.
  std::vector<T> gop(static_cast<std::size_t>(ks.out_ch) * l.tiles, T(0));
  for (int o = 0; o < ks.out_ch; ++o)
    for (int i = 0; i < l.h; ++i)
      std::copy_n(grad_out.channel(o).data() + static_cast<std::size_t>(i) * l.w, l.w,
                  gop.data() + o * l.tiles + static_cast<std::size_t>(i) * l.wp);

  BasicGradBundle<T> g;
  g.grad_bias.resize(ks.out_ch);
  for (int o = 0; o < ks.out_ch; ++o) {
    Vec<T> s{};
    for (std::size_t p = 0; p < l.tiles; p += kLanes<T>) s += load(gop.data() + o * l.tiles + p);
    g.grad_bias[o] = lane_sum<T>(s);
  }

  g.grad_weights.assign(ks.weight_count(), T(0));
  if (taps == 1)
    weight_grad_1x1(gop.data(), xp.data(), l, ks.out_ch, ks.in_ch, g.grad_weights.data());
  else
    for (int c = 0; c < ks.in_ch; ++c)
      for (int u = 0; u < ks.kh; ++u) {
        const T* src = xp.data() + c * l.plane + l.tap(u, 0);
        const std::size_t t = (static_cast<std::size_t>(c) * ks.kh + u) * ks.kw;
        int o = 0;
        for (; o + kGradBlock <= ks.out_ch; o += kGradBlock) {
          const T* go[kGradBlock];
          for (int b = 0; b < kGradBlock; ++b) go[b] = gop.data() + (o + b) * l.tiles;
          weight_grad_row<T, kGradBlock>(go, src, l, ks.kw, &g.grad_weights[o * stride + t], stride);
        }
        for (; o < ks.out_ch; ++o) {
          const T* go = gop.data() + o * l.tiles;
          weight_grad_row<T, 1>(&go, src, l, ks.kw, &g.grad_weights[o * stride + t], stride);
        }
      }

  // dL/dx is a same-padded convolution of grad_out with the kernel flipped
  // spatially and transposed over channels.
  KernelShape ts{ks.in_ch, ks.out_ch, ks.kh, ks.kw};
  std::vector<T> wt(ks.weight_count());
  for (int o = 0; o < ks.out_ch; ++o)
    for (int c = 0; c < ks.in_ch; ++c)
      for (int u = 0; u < ks.kh; ++u)
        for (int v = 0; v < ks.kw; ++v)
          wt[((static_cast<std::size_t>(c) * ks.out_ch + o) * ks.kh + (ks.kh - 1 - u)) * ks.kw +
             (ks.kw - 1 - v)] = k.weights[o * stride + (c * ks.kh + u) * ks.kw + v];
  const std::vector<T> zero_bias(ks.in_ch, T(0));
  g.grad_input = BasicTensor<T>(x.shape());
  conv_core(pad_input(grad_out, l), l, ts, std::span<const T>(wt),
            std::span<const T>(zero_bias), g.grad_input);
  return g;
}

template <class T>
BasicTensor<T> fully_connected(const BasicTensor<T>& x, const KernelRef<T>& k) {
  validate_kernel(k);
  const KernelShape& ks = k.shape;
  if (ks.kh != 1 || ks.kw != 1 || x.size() != static_cast<std::size_t>(ks.in_ch))
    throw ContractViolation("fully_connected: input " + x.shape().str() +
                            " does not match layer " + ks.str());
  BasicTensor<T> out(ks.out_ch, 1, 1);
  for (int o = 0; o < ks.out_ch; ++o)
    out.data()[o] = k.bias[o] + dot(k.weights.data() + static_cast<std::size_t>(o) * ks.in_ch,
                                    x.data(), ks.in_ch);
  require_finite(out, "fully_connected");
  return out;
}

template <class T>
BasicGradBundle<T> fully_connected_backward(const BasicTensor<T>& x, const KernelRef<T>& k,
                                            const BasicTensor<T>& grad_out) {
  validate_kernel(k);
  const KernelShape& ks = k.shape;
  if (ks.kh != 1 || ks.kw != 1 || x.size() != static_cast<std::size_t>(ks.in_ch) ||
      grad_out.size() != static_cast<std::size_t>(ks.out_ch))
    throw ContractViolation("fully_connected_backward: operands " + x.shape().str() + ", " +
                            grad_out.shape().str() + " do not match layer " + ks.str());
  BasicGradBundle<T> g;
  g.grad_input = BasicTensor<T>(x.shape());
  g.grad_weights.assign(ks.weight_count(), T(0));
  g.grad_bias.assign(grad_out.values().begin(), grad_out.values().end());
  T* gx = g.grad_input.data();
  const T* xv = x.data();
  for (int o = 0; o < ks.out_ch; ++o) {
    const T go = grad_out.data()[o];
    const T* wrow = k.weights.data() + static_cast<std::size_t>(o) * ks.in_ch;
    T* gwrow = g.grad_weights.data() + static_cast<std::size_t>(o) * ks.in_ch;
    for (int c = 0; c < ks.in_ch; ++c) {
      gwrow[c] = go * xv[c];
      gx[c] += wrow[c] * go;
    }
  }
  return g;
}

template <class T>
BasicTensor<T> relu(const BasicTensor<T>& x) {
  BasicTensor<T> out = x;
  for (T& v : out.values()) v = v > T(0) ? v : T(0);
  return out;
}

template <class T>
BasicTensor<T> relu_backward(const BasicTensor<T>& x, const BasicTensor<T>& grad_out) {
  require_same_shape(x.shape(), grad_out.shape(), "relu_backward");
  BasicTensor<T> g(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i)
    g.data()[i] = x.data()[i] > T(0) ? grad_out.data()[i] : T(0);
  return g;
}

template <class T>
BasicTensor<T> concat_channels(std::span<const BasicTensor<T>* const> xs) {
  if (xs.empty()) throw ContractViolation("concat_channels: empty input list");
  const int h = xs[0]->height(), w = xs[0]->width();
  int channels = 0;
  for (const BasicTensor<T>* t : xs) {
    if (t->height() != h || t->width() != w)
      throw ContractViolation("concat_channels: spatial mismatch " + xs[0]->shape().str() +
                              " vs " + t->shape().str());
    channels += t->channels();
  }
  std::vector<T> data;
  data.reserve(static_cast<std::size_t>(channels) * h * w);
  for (const BasicTensor<T>* t : xs) data.insert(data.end(), t->data(), t->data() + t->size());
  return BasicTensor<T>(Shape3{channels, h, w}, std::move(data));
}

template <class T>
BasicTensor<T> concat_channels(const std::vector<BasicTensor<T>>& xs) {
  std::vector<const BasicTensor<T>*> ptrs;
  for (const auto& t : xs) ptrs.push_back(&t);
  return concat_channels<T>(std::span<const BasicTensor<T>* const>(ptrs));
}

template <class T>
BasicTensor<T> slice_channels(const BasicTensor<T>& x, int first, int count) {
  if (first < 0 || count <= 0 || first + count > x.channels())
    throw ContractViolation("slice_channels: range [" + std::to_string(first) + ", " +
                            std::to_string(first + count) + ") outside " + x.shape().str());
  const auto begin = x.values().begin() + first * x.plane_size();
  std::vector<T> data(begin, begin + count * x.plane_size());
  return BasicTensor<T>(Shape3{count, x.height(), x.width()}, std::move(data));
}

template <class T>
BasicTensor<T> add(const BasicTensor<T>& x, const BasicTensor<T>& y) {
  require_same_shape(x.shape(), y.shape(), "add");
  BasicTensor<T> out(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) out.data()[i] = x.data()[i] + y.data()[i];
  return out;
}

#define INCODEC_INSTANTIATE(T)                                                                 \
  template class BasicTensor<T>;                                                               \
  template void require_finite<T>(const BasicTensor<T>&, const char*);                         \
  template void validate_kernel<T>(const KernelRef<T>&);                                       \
  template BasicTensor<T> conv2d_same<T>(const BasicTensor<T>&, const KernelRef<T>&);          \
  template BasicGradBundle<T> conv2d_backward<T>(const BasicTensor<T>&, const KernelRef<T>&,   \
                                                 const BasicTensor<T>&);                       \
  template BasicTensor<T> fully_connected<T>(const BasicTensor<T>&, const KernelRef<T>&);      \
  template BasicGradBundle<T> fully_connected_backward<T>(                                     \
      const BasicTensor<T>&, const KernelRef<T>&, const BasicTensor<T>&);                      \
  template BasicTensor<T> relu<T>(const BasicTensor<T>&);                                      \
  template BasicTensor<T> relu_backward<T>(const BasicTensor<T>&, const BasicTensor<T>&);      \
  template BasicTensor<T> concat_channels<T>(std::span<const BasicTensor<T>* const>);          \
  template BasicTensor<T> concat_channels<T>(const std::vector<BasicTensor<T>>&);              \
  template BasicTensor<T> slice_channels<T>(const BasicTensor<T>&, int, int);                  \
  template BasicTensor<T> add<T>(const BasicTensor<T>&, const BasicTensor<T>&);

INCODEC_INSTANTIATE(float)
INCODEC_INSTANTIATE(double)

#undef INCODEC_INSTANTIATE

}  // namespace incodec

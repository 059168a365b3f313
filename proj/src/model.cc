// src/model.cc

// Copyright 2026  The selfcrit authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "selfcrit/model.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "selfcrit/error.h"

namespace selfcrit {

namespace {

int ceil_div(int a, int b) { return (a + b - 1) / b; }

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Whether the residual around this layer can be the plain identity.
bool residual_is_identity(const SepConvLayer& layer) {
  return layer.channelwise.n2 == layer.pointwise.cols &&
         layer.stride_f == 1 && layer.stride_t == 1;
}

void check_layer(const Tensor3& x, const SepConvLayer& layer) {
  const Tensor3& c = layer.channelwise;
  if (c.n0 < 1 || c.n1 < 1 || c.n2 < 1) {
    throw InvalidInputError("sepconv: empty channelwise kernel");
  }
  if (layer.pointwise.rows != c.n2 || layer.pointwise.cols < 1) {
    throw InvalidInputError("sepconv: pointwise shape does not match D");
  }
  if (layer.stride_f < 1 || layer.stride_t < 1) {
    throw InvalidInputError("sepconv: strides must be positive");
  }
  if (x.n0 < 1 || x.n1 < 1 || x.n2 != c.n2) {
    throw InvalidInputError("sepconv: input channels do not match kernel");
  }
  bool identity = residual_is_identity(layer);
  if (layer.has_residual && !identity) {
    if (!layer.projection || layer.projection->rows != c.n2 ||
        layer.projection->cols != layer.pointwise.cols) {
      throw InvalidInputError(
          "sepconv: shape-changing residual needs a D x N projection");
    }
  } else if (layer.projection) {
    throw InvalidInputError("sepconv: projection given but not used");
  }
}

// Core of the separable convolution; reports the channelwise stage when the
// caller needs it for backward. Same padding places output anchor (i*sf,
// j*st) under kernel offset (Pf, Pt); reads outside the input are zero.
Tensor3 sepconv_apply(const Tensor3& x, const SepConvLayer& layer,
                      Tensor3* chanwise_out) {
  check_layer(x, layer);
  const Tensor3& c = layer.channelwise;
  int kw = c.n0, kh = c.n1, depth = c.n2;
  int n_out = layer.pointwise.cols;
  int pf = kw / 2, pt = kh / 2;
  int fo = ceil_div(x.n0, layer.stride_f);
  int to = ceil_div(x.n1, layer.stride_t);

  Tensor3 s(fo, to, depth);
  for (int i = 0; i < fo; ++i) {
    for (int j = 0; j < to; ++j) {
      for (int d = 0; d < depth; ++d) {
        double acc = 0.0;
        for (int a = 0; a < kw; ++a) {
          int fi = i * layer.stride_f + pf - a;
          if (fi < 0 || fi >= x.n0) continue;
          for (int b = 0; b < kh; ++b) {
            int tj = j * layer.stride_t + pt - b;
            if (tj < 0 || tj >= x.n1) continue;
            acc += c.at(a, b, d) * x.at(fi, tj, d);
          }
        }
        s.at(i, j, d) = acc;
      }
    }
  }

  Tensor3 o(fo, to, n_out);
  for (int i = 0; i < fo; ++i) {
    for (int j = 0; j < to; ++j) {
      for (int n = 0; n < n_out; ++n) {
        double acc = 0.0;
        for (int d = 0; d < depth; ++d) {
          acc += s.at(i, j, d) * layer.pointwise.at(d, n);
        }
        o.at(i, j, n) = acc;
      }
    }
  }

  if (layer.has_residual) {
    if (residual_is_identity(layer)) {
      for (size_t k = 0; k < o.data.size(); ++k) o.data[k] += x.data[k];
    } else {
      const Matrix& proj = *layer.projection;
      for (int i = 0; i < fo; ++i) {
        for (int j = 0; j < to; ++j) {
          for (int n = 0; n < n_out; ++n) {
            double acc = 0.0;
            for (int d = 0; d < depth; ++d) {
              acc += x.at(i * layer.stride_f, j * layer.stride_t, d) *
                     proj.at(d, n);
            }
            o.at(i, j, n) += acc;
          }
        }
      }
    }
  }

  if (chanwise_out) *chanwise_out = std::move(s);
  return o;
}

// Drops (training) or rescales (inference) a buffer in place per the
// original dropout convention; returns the 0/1 mask when one was sampled.
std::vector<double> apply_dropout(std::vector<double>& values, double rate,
                                  Rng* rng) {
  std::vector<double> mask;
  if (rate <= 0.0) return mask;
  double keep = 1.0 - rate;
  if (rng) {
    mask.resize(values.size());
    for (size_t i = 0; i < values.size(); ++i) {
      mask[i] = rng->uniform01() < keep ? 1.0 : 0.0;
      values[i] *= mask[i];
    }
  } else {
    for (double& v : values) v *= keep;
  }
  return mask;
}

// Backward counterpart: mask when one was sampled, keep-prob scale when the
// forward pass ran in inference mode.
void dropout_backward(std::vector<double>& grads,
                      const std::vector<double>& mask, double rate) {
  if (rate <= 0.0) return;
  if (!mask.empty()) {
    for (size_t i = 0; i < grads.size(); ++i) grads[i] *= mask[i];
  } else {
    double keep = 1.0 - rate;
    for (double& g : grads) g *= keep;
  }
}

}  // namespace

Tensor3 sepconv_forward(const Tensor3& input, const SepConvLayer& layer) {
  return sepconv_apply(input, layer, nullptr);
}

Model::Model(ModelConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.input_freq < 1 || cfg_.input_channels < 1) {
    throw InvalidInputError("model: input dimensions must be positive");
  }
  if (cfg_.hidden < 1) {
    throw InvalidInputError("model: hidden size must be positive");
  }
  if (cfg_.num_classes < 2) {
    throw InvalidInputError("model: need blank plus at least one label");
  }
  if (cfg_.dropout_conv < 0.0 || cfg_.dropout_conv >= 1.0 ||
      cfg_.dropout_recurrent < 0.0 || cfg_.dropout_recurrent >= 1.0) {
    throw InvalidInputError("model: dropout rates must lie in [0, 1)");
  }
  if (cfg_.batch_norm) {
    throw InvalidInputError(
        "model: batch_norm is declared for config parity but not "
        "implemented; disable it");
  }

  int64_t offset = 0;
  auto add = [&](std::string name, std::vector<int> shape, double bound) {
    int64_t size = 1;
    for (int dim : shape) size *= dim;
    slices_.push_back(ParamSlice{std::move(name), std::move(shape), offset,
                                 size});
    init_bounds_.push_back(bound);
    offset += size;
  };

  int depth = cfg_.input_channels;
  for (size_t b = 0; b < cfg_.conv.size(); ++b) {
    const ConvBlockConfig& bc = cfg_.conv[b];
    if (bc.channels < 1 || bc.kernel_f < 1 || bc.kernel_t < 1 ||
        bc.stride_f < 1 || bc.stride_t < 1) {
      throw InvalidInputError("model: conv block " + std::to_string(b) +
                              " has a non-positive dimension");
    }
    std::string prefix = "conv" + std::to_string(b);
    add(prefix + ".channelwise", {bc.kernel_f, bc.kernel_t, depth},
        std::sqrt(6.0 / (bc.kernel_f * bc.kernel_t)));
    add(prefix + ".pointwise", {depth, bc.channels},
        std::sqrt(6.0 / depth));
    bool needs_projection = bc.residual && (depth != bc.channels ||
                                            bc.stride_f != 1 ||
                                            bc.stride_t != 1);
    if (needs_projection) {
      add(prefix + ".projection", {depth, bc.channels},
          std::sqrt(6.0 / depth));
    }
    depth = bc.channels;
  }

  int c = depth;  // recurrent input width after the frequency pool
  int h = cfg_.hidden;
  const double rb = 1.0 / 32.0;
  add("gru.wz", {h, c}, rb);
  add("gru.uz", {h, h}, rb);
  add("gru.bz", {h}, 0.0);
  add("gru.wr", {h, c}, rb);
  add("gru.ur", {h, h}, rb);
  add("gru.br", {h}, 0.0);
  add("gru.wh", {h, c}, rb);
  add("gru.uh", {h, h}, rb);
  add("gru.bh", {h}, 0.0);
  add("head.weight", {cfg_.num_classes, h}, std::sqrt(6.0 / h));
  add("head.bias", {cfg_.num_classes}, 0.0);

  params_.assign(static_cast<size_t>(offset), 0.0);
}

const ParamSlice* Model::find_slice(const std::string& name) const {
  for (const ParamSlice& s : slices_) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

const ParamSlice& Model::slice(const std::string& name) const {
  const ParamSlice* s = find_slice(name);
  if (!s) throw InvalidInputError("model: no parameter slice '" + name + "'");
  return *s;
}

const double* Model::slice_ptr(const std::string& name) const {
  return params_.data() + slice(name).offset;
}

void Model::init_params(uint64_t seed) {
  Rng rng(derive_seed(seed, rngtag::kInit));
  for (size_t i = 0; i < slices_.size(); ++i) {
    double bound = init_bounds_[i];
    double* p = params_.data() + slices_[i].offset;
    for (int64_t j = 0; j < slices_[i].size; ++j) {
      p[j] = bound == 0.0 ? 0.0 : rng.uniform(-bound, bound);
    }
  }
}

int Model::output_frames(int input_frames) const {
  if (input_frames < 1) {
    throw InvalidInputError("model: input frame count must be positive");
  }
  int t = input_frames;
  for (const ConvBlockConfig& bc : cfg_.conv) t = ceil_div(t, bc.stride_t);
  return t;
}

SepConvLayer Model::layer_view(int block) const {
  const ConvBlockConfig& bc = cfg_.conv[block];
  std::string prefix = "conv" + std::to_string(block);
  const ParamSlice& cw = slice(prefix + ".channelwise");
  int depth = cw.shape[2];

  SepConvLayer layer;
  layer.channelwise = Tensor3(cw.shape[0], cw.shape[1], depth);
  std::copy_n(params_.data() + cw.offset, cw.size,
              layer.channelwise.data.data());
  const ParamSlice& pw = slice(prefix + ".pointwise");
  layer.pointwise = Matrix(depth, bc.channels);
  std::copy_n(params_.data() + pw.offset, pw.size,
              layer.pointwise.data.data());
  layer.stride_f = bc.stride_f;
  layer.stride_t = bc.stride_t;
  layer.has_residual = bc.residual;
  if (const ParamSlice* pr = find_slice(prefix + ".projection")) {
    Matrix proj(depth, bc.channels);
    std::copy_n(params_.data() + pr->offset, pr->size, proj.data.data());
    layer.projection = std::move(proj);
  }
  return layer;
}

Matrix Model::forward(const Tensor3& input, ForwardCache* cache,
                      Rng* dropout_rng) const {
  if (input.n0 != cfg_.input_freq || input.n2 != cfg_.input_channels) {
    throw InvalidInputError("model: input shape does not match config");
  }
  if (input.n1 < 1) {
    throw InvalidInputError("model: input needs at least one frame");
  }
  if (!input.all_finite()) {
    throw InvalidInputError("model: non-finite input");
  }
  if (cache) {
    cache->valid = false;
    cache->blocks.clear();
  }

  Tensor3 cur = input;
  for (size_t b = 0; b < cfg_.conv.size(); ++b) {
    std::vector<double> mask =
        apply_dropout(cur.data, cfg_.dropout_conv, dropout_rng);
    Tensor3 chanwise;
    Tensor3 lin = sepconv_apply(cur, layer_view(static_cast<int>(b)),
                                &chanwise);
    for (double& v : lin.data) v = std::tanh(v);
    if (cache) {
      cache->blocks.push_back(ForwardCache::ConvBlockCache{
          std::move(cur), std::move(mask), std::move(chanwise), lin});
    }
    cur = std::move(lin);
  }

  int fp = cur.n0, tp = cur.n1, c = cur.n2;
  Matrix pooled(tp, c);
  for (int j = 0; j < tp; ++j) {
    for (int ch = 0; ch < c; ++ch) {
      double acc = 0.0;
      for (int i = 0; i < fp; ++i) acc += cur.at(i, j, ch);
      pooled.at(j, ch) = acc / fp;
    }
  }
  if (cache) cache->conv_out = std::move(cur);

  std::vector<double> rmask =
      apply_dropout(pooled.data, cfg_.dropout_recurrent, dropout_rng);

  int h = cfg_.hidden;
  const double* wz = slice_ptr("gru.wz");
  const double* uz = slice_ptr("gru.uz");
  const double* bz = slice_ptr("gru.bz");
  const double* wr = slice_ptr("gru.wr");
  const double* ur = slice_ptr("gru.ur");
  const double* br = slice_ptr("gru.br");
  const double* wh = slice_ptr("gru.wh");
  const double* uh = slice_ptr("gru.uh");
  const double* bh = slice_ptr("gru.bh");

  Matrix z(tp, h), r(tp, h), hc(tp, h), hmat(tp, h);
  std::vector<double> hprev(h, 0.0);
  for (int t = 0; t < tp; ++t) {
    for (int i = 0; i < h; ++i) {
      double az = bz[i], ar = br[i];
      for (int k = 0; k < c; ++k) {
        az += wz[i * c + k] * pooled.at(t, k);
        ar += wr[i * c + k] * pooled.at(t, k);
      }
      for (int k = 0; k < h; ++k) {
        az += uz[i * h + k] * hprev[k];
        ar += ur[i * h + k] * hprev[k];
      }
      z.at(t, i) = sigmoid(az);
      r.at(t, i) = sigmoid(ar);
    }
    for (int i = 0; i < h; ++i) {
      double ah = bh[i];
      for (int k = 0; k < c; ++k) ah += wh[i * c + k] * pooled.at(t, k);
      for (int k = 0; k < h; ++k) {
        ah += uh[i * h + k] * (r.at(t, k) * hprev[k]);
      }
      hc.at(t, i) = std::tanh(ah);
      hmat.at(t, i) =
          (1.0 - z.at(t, i)) * hprev[i] + z.at(t, i) * hc.at(t, i);
    }
    for (int i = 0; i < h; ++i) hprev[i] = hmat.at(t, i);
  }

  const double* wo = slice_ptr("head.weight");
  const double* bo = slice_ptr("head.bias");
  int kk = cfg_.num_classes;
  Matrix logits(tp, kk);
  for (int t = 0; t < tp; ++t) {
    for (int k = 0; k < kk; ++k) {
      double acc = bo[k];
      for (int i = 0; i < h; ++i) acc += wo[k * h + i] * hmat.at(t, i);
      logits.at(t, k) = acc;
    }
  }

  if (cache) {
    cache->recurrent_mask = std::move(rmask);
    cache->gru_input = std::move(pooled);
    cache->z = std::move(z);
    cache->r = std::move(r);
    cache->hc = std::move(hc);
    cache->h = std::move(hmat);
    cache->logits = logits;
    cache->valid = true;
  }
  return logits;
}

std::vector<double> Model::backward(const ForwardCache& cache,
                                    const Matrix& dlogits) const {
  if (!cache.valid) {
    throw InvalidStateError("model: backward needs a cache filled by forward");
  }
  int gru_width =
      cfg_.conv.empty() ? cfg_.input_channels : cfg_.conv.back().channels;
  if (cache.blocks.size() != cfg_.conv.size() ||
      cache.h.cols != cfg_.hidden ||
      cache.logits.cols != cfg_.num_classes ||
      cache.gru_input.cols != gru_width ||
      cache.gru_input.rows != cache.logits.rows) {
    throw InvalidStateError("model: cache does not match this configuration");
  }
  if (!dlogits.same_shape(cache.logits)) {
    throw InvalidStateError("model: gradient shape does not match cache");
  }

  std::vector<double> grads(params_.size(), 0.0);
  int tp = cache.logits.rows;
  int kk = cfg_.num_classes;
  int h = cfg_.hidden;
  int c = cache.gru_input.cols;

  const double* wo = slice_ptr("head.weight");
  double* dwo = grads.data() + slice("head.weight").offset;
  double* dbo = grads.data() + slice("head.bias").offset;
  Matrix dh(tp, h);
  for (int t = 0; t < tp; ++t) {
    for (int k = 0; k < kk; ++k) {
      double g = dlogits.at(t, k);
      dbo[k] += g;
      for (int i = 0; i < h; ++i) {
        dwo[k * h + i] += g * cache.h.at(t, i);
        dh.at(t, i) += wo[k * h + i] * g;
      }
    }
  }

  const double* wz = slice_ptr("gru.wz");
  const double* uz = slice_ptr("gru.uz");
  const double* wr = slice_ptr("gru.wr");
  const double* ur = slice_ptr("gru.ur");
  const double* wh = slice_ptr("gru.wh");
  const double* uh = slice_ptr("gru.uh");
  double* dwz = grads.data() + slice("gru.wz").offset;
  double* duz = grads.data() + slice("gru.uz").offset;
  double* dbz = grads.data() + slice("gru.bz").offset;
  double* dwr = grads.data() + slice("gru.wr").offset;
  double* dur = grads.data() + slice("gru.ur").offset;
  double* dbr = grads.data() + slice("gru.br").offset;
  double* dwh = grads.data() + slice("gru.wh").offset;
  double* duh = grads.data() + slice("gru.uh").offset;
  double* dbh = grads.data() + slice("gru.bh").offset;

  Matrix du(tp, c);
  std::vector<double> dnext(h, 0.0);
  std::vector<double> dht(h), dz_pre(h), dhc_pre(h), drh(h), dr_pre(h),
      dhprev(h);
  for (int t = tp - 1; t >= 0; --t) {
    for (int i = 0; i < h; ++i) dht[i] = dh.at(t, i) + dnext[i];
    auto hprev_at = [&](int i) {
      return t > 0 ? cache.h.at(t - 1, i) : 0.0;
    };
    for (int i = 0; i < h; ++i) {
      double zi = cache.z.at(t, i);
      double hci = cache.hc.at(t, i);
      dz_pre[i] = dht[i] * (hci - hprev_at(i)) * zi * (1.0 - zi);
      dhc_pre[i] = dht[i] * zi * (1.0 - hci * hci);
      dhprev[i] = dht[i] * (1.0 - zi);
    }
    // Candidate pre-activation fans out through Uh to r * h_prev.
    for (int k = 0; k < h; ++k) {
      double acc = 0.0;
      for (int i = 0; i < h; ++i) acc += uh[i * h + k] * dhc_pre[i];
      drh[k] = acc;
    }
    for (int k = 0; k < h; ++k) {
      double rk = cache.r.at(t, k);
      dr_pre[k] = drh[k] * hprev_at(k) * rk * (1.0 - rk);
      dhprev[k] += drh[k] * rk;
    }
    for (int i = 0; i < h; ++i) {
      dbz[i] += dz_pre[i];
      dbr[i] += dr_pre[i];
      dbh[i] += dhc_pre[i];
      for (int k = 0; k < c; ++k) {
        double u = cache.gru_input.at(t, k);
        dwz[i * c + k] += dz_pre[i] * u;
        dwr[i * c + k] += dr_pre[i] * u;
        dwh[i * c + k] += dhc_pre[i] * u;
        du.at(t, k) += wz[i * c + k] * dz_pre[i] + wr[i * c + k] * dr_pre[i] +
                       wh[i * c + k] * dhc_pre[i];
      }
      for (int k = 0; k < h; ++k) {
        double hp = hprev_at(k);
        duz[i * h + k] += dz_pre[i] * hp;
        dur[i * h + k] += dr_pre[i] * hp;
        duh[i * h + k] += dhc_pre[i] * (cache.r.at(t, k) * hp);
      }
    }
    for (int k = 0; k < h; ++k) {
      double acc = dhprev[k];
      for (int i = 0; i < h; ++i) {
        acc += uz[i * h + k] * dz_pre[i] + ur[i * h + k] * dr_pre[i];
      }
      dnext[k] = acc;
    }
  }

  dropout_backward(du.data, cache.recurrent_mask, cfg_.dropout_recurrent);

  int fp = cache.conv_out.n0;
  Tensor3 dout(cache.conv_out.n0, cache.conv_out.n1, cache.conv_out.n2);
  for (int i = 0; i < dout.n0; ++i) {
    for (int j = 0; j < dout.n1; ++j) {
      for (int ch = 0; ch < dout.n2; ++ch) {
        dout.at(i, j, ch) = du.at(j, ch) / fp;
      }
    }
  }

  for (int b = static_cast<int>(cfg_.conv.size()) - 1; b >= 0; --b) {
    const ForwardCache::ConvBlockCache& bc = cache.blocks[b];
    const ConvBlockConfig& conf = cfg_.conv[b];
    std::string prefix = "conv" + std::to_string(b);
    const ParamSlice& cw = slice(prefix + ".channelwise");
    int kw = cw.shape[0], kh = cw.shape[1], depth = cw.shape[2];
    int n_out = conf.channels;
    int pf = kw / 2, pt = kh / 2;
    int fo = bc.activated.n0, to = bc.activated.n1;

    // Through the activation: cached value is tanh(pre).
    Tensor3 dpre = dout;
    for (size_t idx = 0; idx < dpre.data.size(); ++idx) {
      double y = bc.activated.data[idx];
      dpre.data[idx] *= 1.0 - y * y;
    }

    const double* pw = slice_ptr(prefix + ".pointwise");
    double* dpw = grads.data() + slice(prefix + ".pointwise").offset;
    Tensor3 ds(fo, to, depth);
    for (int i = 0; i < fo; ++i) {
      for (int j = 0; j < to; ++j) {
        for (int d = 0; d < depth; ++d) {
          double s = bc.chanwise.at(i, j, d);
          double acc = 0.0;
          for (int n = 0; n < n_out; ++n) {
            double g = dpre.at(i, j, n);
            dpw[d * n_out + n] += s * g;
            acc += pw[d * n_out + n] * g;
          }
          ds.at(i, j, d) = acc;
        }
      }
    }

    const double* cwp = params_.data() + cw.offset;
    double* dcw = grads.data() + cw.offset;
    Tensor3 dx(bc.input.n0, bc.input.n1, bc.input.n2);
    for (int i = 0; i < fo; ++i) {
      for (int j = 0; j < to; ++j) {
        for (int d = 0; d < depth; ++d) {
          double g = ds.at(i, j, d);
          if (g == 0.0) continue;
          for (int a = 0; a < kw; ++a) {
            int fi = i * conf.stride_f + pf - a;
            if (fi < 0 || fi >= bc.input.n0) continue;
            for (int b2 = 0; b2 < kh; ++b2) {
              int tj = j * conf.stride_t + pt - b2;
              if (tj < 0 || tj >= bc.input.n1) continue;
              int widx = (a * kh + b2) * depth + d;
              dcw[widx] += bc.input.at(fi, tj, d) * g;
              dx.at(fi, tj, d) += cwp[widx] * g;
            }
          }
        }
      }
    }

    if (conf.residual) {
      if (const ParamSlice* pr = find_slice(prefix + ".projection")) {
        const double* projp = params_.data() + pr->offset;
        double* dproj = grads.data() + pr->offset;
        for (int i = 0; i < fo; ++i) {
          for (int j = 0; j < to; ++j) {
            int fi = i * conf.stride_f;
            int tj = j * conf.stride_t;
            for (int n = 0; n < n_out; ++n) {
              double g = dpre.at(i, j, n);
              for (int d = 0; d < depth; ++d) {
                dproj[d * n_out + n] += bc.input.at(fi, tj, d) * g;
                dx.at(fi, tj, d) += projp[d * n_out + n] * g;
              }
            }
          }
        }
      } else {
        for (size_t idx = 0; idx < dx.data.size(); ++idx) {
          dx.data[idx] += dpre.data[idx];
        }
      }
    }

    dropout_backward(dx.data, bc.dropout_mask, cfg_.dropout_conv);
    dout = std::move(dx);
  }

  return grads;
}

}  // namespace selfcrit

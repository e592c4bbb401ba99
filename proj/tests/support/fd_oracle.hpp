#pragma once

// Independent reference for the network loss and its finite-difference
// gradient. Written against the documented math only (affine layers,
// hidden activation, 100*sigmoid output, mean data term, summed
// penalties) and evaluated in long double, so it shares no code with the
// library's forward or backward pass.

#include "chromainv/fnn.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace chromainv::oracle {

struct OracleLayer {
  int rows = 0;
  int cols = 0;
  std::vector<long double> w; // column-major, rows x cols
  std::vector<long double> b;
};

struct OracleNet {
  std::vector<OracleLayer> layers;
  bool tanh_hidden = false;

  static OracleNet from(const FnnModel& model)
  {
    OracleNet net;
    net.tanh_hidden = model.activation() == Activation::tanh;
    for (std::size_t l = 0; l < model.layer_count(); ++l) {
      OracleLayer layer;
      layer.rows = static_cast<int>(model.weight(l).rows());
      layer.cols = static_cast<int>(model.weight(l).cols());
      for (int c = 0; c < layer.cols; ++c)
        for (int r = 0; r < layer.rows; ++r)
          layer.w.push_back(model.weight(l)(r, c));
      for (int r = 0; r < layer.rows; ++r)
        layer.b.push_back(model.bias(l)(r));
      net.layers.push_back(std::move(layer));
    }
    return net;
  }

  /// Parameter k in the FnnModel::parameters() layout.
  long double& parameter(std::size_t k)
  {
    for (auto& layer : layers) {
      if (k < layer.w.size())
        return layer.w[k];
      k -= layer.w.size();
      if (k < layer.b.size())
        return layer.b[k];
      k -= layer.b.size();
    }
    throw std::out_of_range("parameter index");
  }

  std::size_t parameter_count() const
  {
    std::size_t n = 0;
    for (const auto& layer : layers)
      n += layer.w.size() + layer.b.size();
    return n;
  }

  /// Pre-activation of the output layer for one input.
  std::vector<long double> output_logits(const std::vector<long double>& x) const
  {
    std::vector<long double> a = x;
    for (std::size_t l = 0; l < layers.size(); ++l) {
      const OracleLayer& layer = layers[l];
      std::vector<long double> z(layer.rows);
      for (int r = 0; r < layer.rows; ++r) {
        long double s = layer.b[r];
        for (int c = 0; c < layer.cols; ++c)
          s += layer.w[static_cast<std::size_t>(c) * layer.rows + r] * a[c];
        z[r] = s;
      }
      if (l + 1 == layers.size())
        return z;
      for (auto& v : z)
        v = tanh_hidden ? std::tanh(v) : 1.0L / (1.0L + std::exp(-v));
      a = std::move(z);
    }
    return a;
  }

  std::vector<long double> forward(const std::vector<long double>& x) const
  {
    std::vector<long double> z = output_logits(x);
    for (auto& v : z)
      v = 100.0L / (1.0L + std::exp(-v));
    return z;
  }

  long double loss(const Batch& batch, bool l1, long double alpha_w, long double alpha_b) const
  {
    long double data = 0.0L;
    for (Eigen::Index k = 0; k < batch.size(); ++k) {
      std::vector<long double> x(static_cast<std::size_t>(batch.inputs.rows()));
      for (Eigen::Index i = 0; i < batch.inputs.rows(); ++i)
        x[i] = batch.inputs(i, k);
      const auto y = forward(x);
      for (std::size_t i = 0; i < y.size(); ++i) {
        const long double d = y[i] - batch.targets(static_cast<Eigen::Index>(i), k);
        data += l1 ? std::fabs(d) : d * d;
      }
    }
    data /= static_cast<long double>(batch.targets.size());
    long double pw = 0.0L;
    long double pb = 0.0L;
    for (const auto& layer : layers) {
      for (long double w : layer.w)
        pw += l1 ? std::fabs(w) : w * w;
      for (long double b : layer.b)
        pb += l1 ? std::fabs(b) : b * b;
    }
    return data + alpha_w * pw + alpha_b * pb;
  }

  /// Smallest |yhat - y| over the batch; L1 data terms have a kink there.
  long double min_abs_residual(const Batch& batch) const
  {
    long double m = INFINITY;
    for (Eigen::Index k = 0; k < batch.size(); ++k) {
      std::vector<long double> x(static_cast<std::size_t>(batch.inputs.rows()));
      for (Eigen::Index i = 0; i < batch.inputs.rows(); ++i)
        x[i] = batch.inputs(i, k);
      const auto y = forward(x);
      for (std::size_t i = 0; i < y.size(); ++i)
        m = std::min(m, std::fabs(y[i] - batch.targets(static_cast<Eigen::Index>(i), k)));
    }
    return m;
  }
};

/// Central-difference gradient of the oracle loss with step h.
inline std::vector<long double> fd_gradient(OracleNet net, const Batch& batch, bool l1, long double alpha_w,
                                            long double alpha_b, long double h = 1e-6L)
{
  std::vector<long double> g(net.parameter_count());
  for (std::size_t k = 0; k < g.size(); ++k) {
    long double& p = net.parameter(k);
    const long double saved = p;
    p = saved + h;
    const long double up = net.loss(batch, l1, alpha_w, alpha_b);
    p = saved - h;
    const long double down = net.loss(batch, l1, alpha_w, alpha_b);
    p = saved;
    g[k] = (up - down) / (2.0L * h);
  }
  return g;
}

} // namespace chromainv::oracle

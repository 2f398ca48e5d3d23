#include "netscan/tape.hpp"

#include <cmath>

#include "netscan/errors.hpp"

namespace netscan {

Var Tape::push(Matrix value, std::function<void(Tape&)> back) {
  Node n;
  n.value = std::move(value);
  n.grad = Matrix(n.value.rows, n.value.cols);
  n.back = std::move(back);
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Var Tape::leaf(Matrix value) { return push(std::move(value)); }

const Matrix& Tape::val(Var v) const { return nodes_[static_cast<size_t>(v.i)].value; }
const Matrix& Tape::grad(Var v) const { return nodes_[static_cast<size_t>(v.i)].grad; }

Var Tape::matmul(Var a, Var b) {
  Matrix out = netscan::matmul(v(a), v(b));
  return push(std::move(out), [a, b, n = nodes_.size()](Tape& t) {
    const Matrix& dout = t.nodes_[n].grad;
    const Matrix& av = t.v(a);
    const Matrix& bv = t.v(b);
    Matrix& da = t.g(a);
    Matrix& db = t.g(b);
    // dA += dOut * B^T : row i of dA is dot products of dOut row i with B rows
    for (int i = 0; i < dout.rows; ++i) {
      const double* drow = dout.row(i);
      double* darow = da.row(i);
      for (int k = 0; k < bv.rows; ++k) {
        const double* brow = bv.row(k);
        double acc = 0.0;
        for (int j = 0; j < dout.cols; ++j) acc += drow[j] * brow[j];
        darow[k] += acc;
      }
    }
    // dB += A^T * dOut
    for (int i = 0; i < av.rows; ++i) {
      const double* arow = av.row(i);
      const double* drow = dout.row(i);
      for (int k = 0; k < av.cols; ++k) {
        const double aik = arow[k];
        if (aik == 0.0) continue;
        double* dbrow = db.row(k);
        for (int j = 0; j < dout.cols; ++j) dbrow[j] += aik * drow[j];
      }
    }
  });
}

Var Tape::add(Var a, Var b) {
  if (!v(a).same_shape(v(b))) throw ScanError(Err::ShapeMismatch, "add");
  Matrix out = v(a);
  const Matrix& bv = v(b);
  for (size_t i = 0; i < out.size(); ++i) out.data[i] += bv.data[i];
  return push(std::move(out), [a, b, n = nodes_.size()](Tape& t) {
    const Matrix& dout = t.nodes_[n].grad;
    Matrix& da = t.g(a);
    Matrix& db = t.g(b);
    for (size_t i = 0; i < dout.size(); ++i) {
      da.data[i] += dout.data[i];
      db.data[i] += dout.data[i];
    }
  });
}

Var Tape::sub(Var a, Var b) {
  if (!v(a).same_shape(v(b))) throw ScanError(Err::ShapeMismatch, "sub");
  Matrix out = v(a);
  const Matrix& bv = v(b);
  for (size_t i = 0; i < out.size(); ++i) out.data[i] -= bv.data[i];
  return push(std::move(out), [a, b, n = nodes_.size()](Tape& t) {
    const Matrix& dout = t.nodes_[n].grad;
    Matrix& da = t.g(a);
    Matrix& db = t.g(b);
    for (size_t i = 0; i < dout.size(); ++i) {
      da.data[i] += dout.data[i];
      db.data[i] -= dout.data[i];
    }
  });
}

Var Tape::add_rowvec(Var m, Var bias) {
  const Matrix& mv = v(m);
  const Matrix& bv = v(bias);
  if (bv.rows != 1 || bv.cols != mv.cols) throw ScanError(Err::ShapeMismatch, "add_rowvec");
  Matrix out = mv;
  for (int r = 0; r < out.rows; ++r)
    for (int c = 0; c < out.cols; ++c) out.at(r, c) += bv.at(0, c);
  return push(std::move(out), [m, bias, n = nodes_.size()](Tape& t) {
    const Matrix& dout = t.nodes_[n].grad;
    Matrix& dm = t.g(m);
    Matrix& db = t.g(bias);
    for (size_t i = 0; i < dout.size(); ++i) dm.data[i] += dout.data[i];
    for (int r = 0; r < dout.rows; ++r)
      for (int c = 0; c < dout.cols; ++c) db.at(0, c) += dout.at(r, c);
  });
}

Var Tape::relu(Var a) {
  Matrix out = v(a);
  for (auto& x : out.data)
    if (x < 0.0) x = 0.0;
  return push(std::move(out), [a, n = nodes_.size()](Tape& t) {
    const Matrix& dout = t.nodes_[n].grad;
    const Matrix& outv = t.nodes_[n].value;
    Matrix& da = t.g(a);
    for (size_t i = 0; i < dout.size(); ++i)
      if (outv.data[i] > 0.0) da.data[i] += dout.data[i];
  });
}

Var Tape::tanh(Var a) {
  Matrix out = v(a);
  for (auto& x : out.data) x = std::tanh(x);
  return push(std::move(out), [a, n = nodes_.size()](Tape& t) {
    const Matrix& dout = t.nodes_[n].grad;
    const Matrix& outv = t.nodes_[n].value;
    Matrix& da = t.g(a);
    for (size_t i = 0; i < dout.size(); ++i)
      da.data[i] += dout.data[i] * (1.0 - outv.data[i] * outv.data[i]);
  });
}

Var Tape::sigmoid(Var a) {
  Matrix out = v(a);
  for (auto& x : out.data) x = 1.0 / (1.0 + std::exp(-x));
  return push(std::move(out), [a, n = nodes_.size()](Tape& t) {
    const Matrix& dout = t.nodes_[n].grad;
    const Matrix& outv = t.nodes_[n].value;
    Matrix& da = t.g(a);
    for (size_t i = 0; i < dout.size(); ++i)
      da.data[i] += dout.data[i] * outv.data[i] * (1.0 - outv.data[i]);
  });
}

Var Tape::hadamard(Var a, Var b) {
  if (!v(a).same_shape(v(b))) throw ScanError(Err::ShapeMismatch, "hadamard");
  Matrix out = v(a);
  const Matrix& bv = v(b);
  for (size_t i = 0; i < out.size(); ++i) out.data[i] *= bv.data[i];
  return push(std::move(out), [a, b, n = nodes_.size()](Tape& t) {
    const Matrix& dout = t.nodes_[n].grad;
    const Matrix& av = t.v(a);
    const Matrix& bv2 = t.v(b);
    Matrix& da = t.g(a);
    Matrix& db = t.g(b);
    for (size_t i = 0; i < dout.size(); ++i) {
      da.data[i] += dout.data[i] * bv2.data[i];
      db.data[i] += dout.data[i] * av.data[i];
    }
  });
}

Var Tape::scale(Var a, double s) {
  Matrix out = v(a);
  for (auto& x : out.data) x *= s;
  return push(std::move(out), [a, s, n = nodes_.size()](Tape& t) {
    const Matrix& dout = t.nodes_[n].grad;
    Matrix& da = t.g(a);
    for (size_t i = 0; i < dout.size(); ++i) da.data[i] += dout.data[i] * s;
  });
}

Var Tape::row_scale(Var m, Var s) {
  const Matrix& mv = v(m);
  const Matrix& sv = v(s);
  if (sv.cols != 1 || sv.rows != mv.rows) throw ScanError(Err::ShapeMismatch, "row_scale");
  Matrix out = mv;
  for (int r = 0; r < out.rows; ++r) {
    const double f = sv.at(r, 0);
    for (int c = 0; c < out.cols; ++c) out.at(r, c) *= f;
  }
  return push(std::move(out), [m, s, n = nodes_.size()](Tape& t) {
    const Matrix& dout = t.nodes_[n].grad;
    const Matrix& mv2 = t.v(m);
    const Matrix& sv2 = t.v(s);
    Matrix& dm = t.g(m);
    Matrix& ds = t.g(s);
    for (int r = 0; r < dout.rows; ++r) {
      const double f = sv2.at(r, 0);
      double acc = 0.0;
      for (int c = 0; c < dout.cols; ++c) {
        dm.at(r, c) += dout.at(r, c) * f;
        acc += dout.at(r, c) * mv2.at(r, c);
      }
      ds.at(r, 0) += acc;
    }
  });
}

Var Tape::gather_rows(Var m, std::vector<int> ids) {
  const Matrix& mv = v(m);
  Matrix out(static_cast<int>(ids.size()), mv.cols);
  for (size_t r = 0; r < ids.size(); ++r)
    for (int c = 0; c < mv.cols; ++c) out.at(static_cast<int>(r), c) = mv.at(ids[r], c);
  return push(std::move(out), [m, ids = std::move(ids), n = nodes_.size()](Tape& t) {
    const Matrix& dout = t.nodes_[n].grad;
    Matrix& dm = t.g(m);
    for (size_t r = 0; r < ids.size(); ++r)
      for (int c = 0; c < dout.cols; ++c) dm.at(ids[r], c) += dout.at(static_cast<int>(r), c);
  });
}

Var Tape::concat_cols(const std::vector<Var>& parts) {
  if (parts.empty()) throw ScanError(Err::ShapeMismatch, "concat_cols: empty");
  int rows = v(parts[0]).rows;
  int cols = 0;
  for (Var p : parts) {
    if (v(p).rows != rows) throw ScanError(Err::ShapeMismatch, "concat_cols: row mismatch");
    cols += v(p).cols;
  }
  Matrix out(rows, cols);
  int off = 0;
  for (Var p : parts) {
    const Matrix& pv = v(p);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < pv.cols; ++c) out.at(r, off + c) = pv.at(r, c);
    off += pv.cols;
  }
  return push(std::move(out), [parts, n = nodes_.size()](Tape& t) {
    const Matrix& dout = t.nodes_[n].grad;
    int off2 = 0;
    for (Var p : parts) {
      Matrix& dp = t.g(p);
      for (int r = 0; r < dout.rows; ++r)
        for (int c = 0; c < dp.cols; ++c) dp.at(r, c) += dout.at(r, off2 + c);
      off2 += dp.cols;
    }
  });
}

Var Tape::segment_sum(Var m, std::vector<int> seg, int nseg) {
  const Matrix& mv = v(m);
  if (static_cast<int>(seg.size()) != mv.rows) throw ScanError(Err::ShapeMismatch, "segment_sum");
  Matrix out(nseg, mv.cols);
  for (int r = 0; r < mv.rows; ++r)
    for (int c = 0; c < mv.cols; ++c) out.at(seg[static_cast<size_t>(r)], c) += mv.at(r, c);
  return push(std::move(out), [m, seg = std::move(seg), n = nodes_.size()](Tape& t) {
    const Matrix& dout = t.nodes_[n].grad;
    Matrix& dm = t.g(m);
    for (int r = 0; r < dm.rows; ++r)
      for (int c = 0; c < dm.cols; ++c) dm.at(r, c) += dout.at(seg[static_cast<size_t>(r)], c);
  });
}

Var Tape::segment_mean(Var m, std::vector<int> seg, int nseg) {
  const Matrix& mv = v(m);
  if (static_cast<int>(seg.size()) != mv.rows) throw ScanError(Err::ShapeMismatch, "segment_mean");
  std::vector<double> cnt(static_cast<size_t>(nseg), 0.0);
  for (int s : seg) cnt[static_cast<size_t>(s)] += 1.0;
  for (auto& c : cnt)
    if (c == 0.0) throw ScanError(Err::EmptyGraph, "segment_mean: empty segment");
  Matrix out(nseg, mv.cols);
  for (int r = 0; r < mv.rows; ++r)
    for (int c = 0; c < mv.cols; ++c)
      out.at(seg[static_cast<size_t>(r)], c) += mv.at(r, c) / cnt[static_cast<size_t>(seg[static_cast<size_t>(r)])];
  return push(std::move(out), [m, seg = std::move(seg), cnt = std::move(cnt), n = nodes_.size()](Tape& t) {
    const Matrix& dout = t.nodes_[n].grad;
    Matrix& dm = t.g(m);
    for (int r = 0; r < dm.rows; ++r)
      for (int c = 0; c < dm.cols; ++c)
        dm.at(r, c) += dout.at(seg[static_cast<size_t>(r)], c) / cnt[static_cast<size_t>(seg[static_cast<size_t>(r)])];
  });
}

Var Tape::segment_max(Var m, std::vector<int> seg, int nseg) {
  const Matrix& mv = v(m);
  if (static_cast<int>(seg.size()) != mv.rows) throw ScanError(Err::ShapeMismatch, "segment_max");
  Matrix out = Matrix::filled(nseg, mv.cols, -HUGE_VAL);
  // argmax row per (segment, column); first max wins for determinism
  std::vector<int> arg(static_cast<size_t>(nseg) * mv.cols, -1);
  for (int r = 0; r < mv.rows; ++r) {
    const int s = seg[static_cast<size_t>(r)];
    for (int c = 0; c < mv.cols; ++c) {
      if (mv.at(r, c) > out.at(s, c)) {
        out.at(s, c) = mv.at(r, c);
        arg[static_cast<size_t>(s) * mv.cols + c] = r;
      }
    }
  }
  for (int s = 0; s < nseg; ++s)
    for (int c = 0; c < mv.cols; ++c)
      if (arg[static_cast<size_t>(s) * mv.cols + c] < 0)
        throw ScanError(Err::EmptyGraph, "segment_max: empty segment");
  return push(std::move(out), [m, arg = std::move(arg), n = nodes_.size()](Tape& t) {
    const Matrix& dout = t.nodes_[n].grad;
    Matrix& dm = t.g(m);
    for (int s = 0; s < dout.rows; ++s)
      for (int c = 0; c < dout.cols; ++c)
        dm.at(arg[static_cast<size_t>(s) * dout.cols + c], c) += dout.at(s, c);
  });
}

Var Tape::propagate(int out_rows, std::vector<PropagateEntry> entries, Var h) {
  const Matrix& hv = v(h);
  Matrix out(out_rows, hv.cols);
  for (const auto& e : entries) {
    const double* src = hv.row(e.src);
    double* dst = out.row(e.dst);
    for (int c = 0; c < hv.cols; ++c) dst[c] += e.w * src[c];
  }
  return push(std::move(out), [h, entries = std::move(entries), n = nodes_.size()](Tape& t) {
    const Matrix& dout = t.nodes_[n].grad;
    Matrix& dh = t.g(h);
    for (const auto& e : entries) {
      const double* drow = dout.row(e.dst);
      double* dsrc = dh.row(e.src);
      for (int c = 0; c < dout.cols; ++c) dsrc[c] += e.w * drow[c];
    }
  });
}

Var Tape::neighbor_sum_masked(std::vector<EdgeMsg> msgs, Var mask, Var h) {
  const Matrix& hv = v(h);
  const Matrix& mk = v(mask);
  if (mk.cols != 1) throw ScanError(Err::ShapeMismatch, "neighbor_sum_masked: mask must be Ex1");
  Matrix out(hv.rows, hv.cols);
  for (const auto& e : msgs) {
    const double w = mk.at(e.edge, 0);
    const double* src = hv.row(e.src);
    double* dst = out.row(e.dst);
    for (int c = 0; c < hv.cols; ++c) dst[c] += w * src[c];
  }
  return push(std::move(out), [h, mask, msgs = std::move(msgs), n = nodes_.size()](Tape& t) {
    const Matrix& dout = t.nodes_[n].grad;
    const Matrix& hv2 = t.v(h);
    const Matrix& mk2 = t.v(mask);
    Matrix& dh = t.g(h);
    Matrix& dmk = t.g(mask);
    for (const auto& e : msgs) {
      const double w = mk2.at(e.edge, 0);
      const double* drow = dout.row(e.dst);
      const double* src = hv2.row(e.src);
      double* dsrc = dh.row(e.src);
      double acc = 0.0;
      for (int c = 0; c < dout.cols; ++c) {
        dsrc[c] += w * drow[c];
        acc += drow[c] * src[c];
      }
      dmk.at(e.edge, 0) += acc;
    }
  });
}

namespace {

// Effective cell weight under the smooth OR of its mask values, plus the
// partial derivative w.r.t. each contributing mask slot.
double cell_weight(const GcnMaskSupport::Cell& cell, const Matrix& mask) {
  double prod = 1.0;
  for (int e : cell.edges) prod *= 1.0 - mask.at(e, 0);
  return 1.0 - prod;
}

}  // namespace

Var Tape::gcn_propagate_masked(const GcnMaskSupport& sup, Var mask, Var h) {
  const Matrix& hv = v(h);
  const Matrix& mk = v(mask);
  if (hv.rows != sup.n) throw ScanError(Err::ShapeMismatch, "gcn_propagate_masked");
  const int n = sup.n;
  const int cols = hv.cols;

  std::vector<double> w(sup.cells.size());
  std::vector<double> s(static_cast<size_t>(n), 1.0);  // self-loop weight 1
  for (size_t k = 0; k < sup.cells.size(); ++k) {
    w[k] = cell_weight(sup.cells[k], mk);
    s[static_cast<size_t>(sup.cells[k].i)] += w[k];
  }
  std::vector<double> inv_sqrt(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) inv_sqrt[static_cast<size_t>(i)] = 1.0 / std::sqrt(s[static_cast<size_t>(i)]);

  Matrix out(n, cols);
  for (int i = 0; i < n; ++i) {
    const double pii = 1.0 / s[static_cast<size_t>(i)];
    const double* src = hv.row(i);
    double* dst = out.row(i);
    for (int c = 0; c < cols; ++c) dst[c] += pii * src[c];
  }
  for (size_t k = 0; k < sup.cells.size(); ++k) {
    const auto& cell = sup.cells[k];
    const double p = w[k] * inv_sqrt[static_cast<size_t>(cell.i)] * inv_sqrt[static_cast<size_t>(cell.j)];
    const double* src = hv.row(cell.j);
    double* dst = out.row(cell.i);
    for (int c = 0; c < cols; ++c) dst[c] += p * src[c];
  }

  return push(std::move(out),
              [sup, mask, h, w = std::move(w), s = std::move(s), inv_sqrt = std::move(inv_sqrt),
               n2 = nodes_.size()](Tape& t) {
    const Matrix& dout = t.nodes_[n2].grad;
    const Matrix& hv2 = t.v(h);
    const Matrix& mk2 = t.v(mask);
    Matrix& dh = t.g(h);
    Matrix& dmk = t.g(mask);
    const int n = sup.n;
    const int cols = dout.cols;

    // dH = P^T dY, and G-weighted row/column sums needed for the degree terms:
    //   dL/dw_uv = G_uv/sqrt(s_u s_v) - R_u/(2 s_u) - C_v/(2 s_v)
    // where G_ab = <dY[a,:], H[b,:]> on the support and R/C are row/column
    // sums of G .* P (diagonal included).
    std::vector<double> rsum(static_cast<size_t>(n), 0.0);
    std::vector<double> csum(static_cast<size_t>(n), 0.0);
    std::vector<double> gcell(w.size());

    for (int i = 0; i < n; ++i) {
      const double pii = 1.0 / s[static_cast<size_t>(i)];
      const double* drow = dout.row(i);
      const double* hrow = hv2.row(i);
      double* dhrow = dh.row(i);
      double gdiag = 0.0;
      for (int c = 0; c < cols; ++c) {
        dhrow[c] += pii * drow[c];
        gdiag += drow[c] * hrow[c];
      }
      rsum[static_cast<size_t>(i)] += gdiag * pii;
      csum[static_cast<size_t>(i)] += gdiag * pii;
    }
    for (size_t k = 0; k < sup.cells.size(); ++k) {
      const auto& cell = sup.cells[k];
      const double p = w[k] * inv_sqrt[static_cast<size_t>(cell.i)] * inv_sqrt[static_cast<size_t>(cell.j)];
      const double* drow = dout.row(cell.i);
      const double* hrow = hv2.row(cell.j);
      double* dhrow = dh.row(cell.j);
      double gk = 0.0;
      for (int c = 0; c < cols; ++c) {
        dhrow[c] += p * drow[c];
        gk += drow[c] * hrow[c];
      }
      gcell[k] = gk;
      rsum[static_cast<size_t>(cell.i)] += gk * p;
      csum[static_cast<size_t>(cell.j)] += gk * p;
    }
    for (size_t k = 0; k < sup.cells.size(); ++k) {
      const auto& cell = sup.cells[k];
      const double dw = gcell[k] * inv_sqrt[static_cast<size_t>(cell.i)] * inv_sqrt[static_cast<size_t>(cell.j)] -
                        0.5 * rsum[static_cast<size_t>(cell.i)] / s[static_cast<size_t>(cell.i)] -
                        0.5 * csum[static_cast<size_t>(cell.j)] / s[static_cast<size_t>(cell.j)];
      // chain through the smooth OR: dw/dm_e = prod_{e' != e} (1 - m_e')
      for (size_t ei = 0; ei < cell.edges.size(); ++ei) {
        double prod = 1.0;
        for (size_t ej = 0; ej < cell.edges.size(); ++ej)
          if (ej != ei) prod *= 1.0 - mk2.at(cell.edges[ej], 0);
        dmk.at(cell.edges[ei], 0) += dw * prod;
      }
    }
  });
}

Var Tape::dropout(Var a, double rate, Rng& rng, bool training) {
  if (rate < 0.0 || rate >= 1.0) throw ScanError(Err::ConfigError, "dropout rate must be in [0,1)");
  if (!training || rate == 0.0) return a;
  const Matrix& av = v(a);
  Matrix keep(av.rows, av.cols);
  const double inv = 1.0 / (1.0 - rate);
  for (auto& k : keep.data) k = rng.next_double() < rate ? 0.0 : inv;
  Matrix out = av;
  for (size_t i = 0; i < out.size(); ++i) out.data[i] *= keep.data[i];
  return push(std::move(out), [a, keep = std::move(keep), n = nodes_.size()](Tape& t) {
    const Matrix& dout = t.nodes_[n].grad;
    Matrix& da = t.g(a);
    for (size_t i = 0; i < dout.size(); ++i) da.data[i] += dout.data[i] * keep.data[i];
  });
}

Var Tape::sum_all(Var a) {
  double acc = 0.0;
  for (double x : v(a).data) acc += x;
  Matrix out(1, 1);
  out.at(0, 0) = acc;
  return push(std::move(out), [a, n = nodes_.size()](Tape& t) {
    const double d = t.nodes_[n].grad.at(0, 0);
    Matrix& da = t.g(a);
    for (auto& x : da.data) x += d;
  });
}

Var Tape::mean_all(Var a) {
  const double inv = 1.0 / static_cast<double>(v(a).size());
  double acc = 0.0;
  for (double x : v(a).data) acc += x;
  Matrix out(1, 1);
  out.at(0, 0) = acc * inv;
  return push(std::move(out), [a, inv, n = nodes_.size()](Tape& t) {
    const double d = t.nodes_[n].grad.at(0, 0) * inv;
    Matrix& da = t.g(a);
    for (auto& x : da.data) x += d;
  });
}

static constexpr double kEntropyEps = 1e-12;

Var Tape::bernoulli_entropy(Var a) {
  Matrix out = v(a);
  for (auto& x : out.data) {
    const double m = std::min(std::max(x, kEntropyEps), 1.0 - kEntropyEps);
    x = -(m * std::log(m) + (1.0 - m) * std::log(1.0 - m));
  }
  return push(std::move(out), [a, n = nodes_.size()](Tape& t) {
    const Matrix& dout = t.nodes_[n].grad;
    const Matrix& av = t.v(a);
    Matrix& da = t.g(a);
    for (size_t i = 0; i < dout.size(); ++i) {
      const double m = std::min(std::max(av.data[i], kEntropyEps), 1.0 - kEntropyEps);
      da.data[i] += dout.data[i] * std::log((1.0 - m) / m);
    }
  });
}

Var Tape::mean_nll(Var logits, std::vector<int> labels) {
  const Matrix& lv = v(logits);
  if (static_cast<int>(labels.size()) != lv.rows) throw ScanError(Err::LengthMismatch, "mean_nll");
  const int B = lv.rows;
  double loss = 0.0;
  for (int r = 0; r < B; ++r) {
    double mx = -HUGE_VAL;
    for (int c = 0; c < lv.cols; ++c) mx = std::max(mx, lv.at(r, c));
    double lse = 0.0;
    for (int c = 0; c < lv.cols; ++c) lse += std::exp(lv.at(r, c) - mx);
    lse = mx + std::log(lse);
    loss += lse - lv.at(r, labels[static_cast<size_t>(r)]);
  }
  Matrix out(1, 1);
  out.at(0, 0) = loss / B;
  return push(std::move(out), [logits, labels = std::move(labels), n = nodes_.size()](Tape& t) {
    const double d = t.nodes_[n].grad.at(0, 0);
    const Matrix& lv2 = t.v(logits);
    Matrix& dl = t.g(logits);
    const int B = lv2.rows;
    for (int r = 0; r < B; ++r) {
      double mx = -HUGE_VAL;
      for (int c = 0; c < lv2.cols; ++c) mx = std::max(mx, lv2.at(r, c));
      double sum = 0.0;
      for (int c = 0; c < lv2.cols; ++c) sum += std::exp(lv2.at(r, c) - mx);
      for (int c = 0; c < lv2.cols; ++c) {
        double p = std::exp(lv2.at(r, c) - mx) / sum;
        dl.at(r, c) += d * (p - (c == labels[static_cast<size_t>(r)] ? 1.0 : 0.0)) / B;
      }
    }
  });
}

void Tape::backward(Var loss) {
  if (swept_) throw ScanError(Err::TapeExhausted, "backward called twice on one tape");
  swept_ = true;
  Matrix& lg = g(loss);
  if (lg.rows != 1 || lg.cols != 1) throw ScanError(Err::ShapeMismatch, "backward: loss must be 1x1");
  lg.at(0, 0) = 1.0;
  for (int i = static_cast<int>(nodes_.size()) - 1; i >= 0; --i) {
    if (nodes_[static_cast<size_t>(i)].back) nodes_[static_cast<size_t>(i)].back(*this);
  }
}

}  // namespace netscan

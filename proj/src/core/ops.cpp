#include "tta/core/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tta/core/error.hpp"

namespace tta::ops {
namespace {

void expect_rank(const Tensor& t, std::size_t rank, const char* op) {
    if (t.rank() != rank) {
        throw ShapeError(std::string(op) + ": expected rank " + std::to_string(rank) + ", got " +
                         to_string(t.shape));
    }
}

void accumulate(Tape& tape, Var target, const std::vector<double>& delta) {
    if (!tape.requires_grad(target)) return;
    auto& g = tape.grad_of(target);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += delta[i];
}

double clamped_log(double p) { return std::log(std::max(p, kLogFloor)); }

}  // namespace

Var linear(Tape& tape, Var x, Var weight, Var bias) {
    const Tensor& xv = tape.value(x);
    const Tensor& wv = tape.value(weight);
    const Tensor& bv = tape.value(bias);
    expect_rank(xv, 2, "linear");
    expect_rank(wv, 2, "linear");
    const std::size_t n = xv.dim(0), in = xv.dim(1), out = wv.dim(0);
    if (wv.dim(1) != in || bv.size() != out) {
        throw ShapeError("linear: input " + to_string(xv.shape) + " incompatible with weight " +
                         to_string(wv.shape) + " and bias " + to_string(bv.shape));
    }
    Tensor y({n, out});
    for (std::size_t i = 0; i < n; ++i) {
        const double* xr = &xv.data[i * in];
        for (std::size_t o = 0; o < out; ++o) {
            const double* wr = &wv.data[o * in];
            double acc = bv.data[o];
            for (std::size_t k = 0; k < in; ++k) acc += xr[k] * wr[k];
            y.data[i * out + o] = acc;
        }
    }
    return tape.record(std::move(y), {x, weight, bias}, [x, weight, bias, n, in, out](Tape& t, std::size_t self) {
        const auto& gy = t.grad(Var{self});
        const auto& xv = t.value(x).data;
        const auto& wv = t.value(weight).data;
        if (t.requires_grad(x)) {
            auto& gx = t.grad_of(x);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t o = 0; o < out; ++o) {
                    const double g = gy[i * out + o];
                    if (g == 0.0) continue;
                    for (std::size_t k = 0; k < in; ++k) gx[i * in + k] += g * wv[o * in + k];
                }
        }
        if (t.requires_grad(weight)) {
            auto& gw = t.grad_of(weight);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t o = 0; o < out; ++o) {
                    const double g = gy[i * out + o];
                    if (g == 0.0) continue;
                    for (std::size_t k = 0; k < in; ++k) gw[o * in + k] += g * xv[i * in + k];
                }
        }
        if (t.requires_grad(bias)) {
            auto& gb = t.grad_of(bias);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t o = 0; o < out; ++o) gb[o] += gy[i * out + o];
        }
    });
}

Var conv3x3(Tape& tape, Var x, Var weight, Var bias) {
    const Tensor& xv = tape.value(x);
    const Tensor& wv = tape.value(weight);
    const Tensor& bv = tape.value(bias);
    expect_rank(xv, 4, "conv3x3");
    expect_rank(wv, 4, "conv3x3");
    const std::size_t n = xv.dim(0), c = xv.dim(1), h = xv.dim(2), w = xv.dim(3);
    const std::size_t oc = wv.dim(0);
    if (wv.dim(1) != c || wv.dim(2) != 3 || wv.dim(3) != 3 || bv.size() != oc) {
        throw ShapeError("conv3x3: input " + to_string(xv.shape) + " incompatible with weight " +
                         to_string(wv.shape) + " and bias " + to_string(bv.shape));
    }
    const auto in_at = [=](std::size_t b, std::size_t ch, std::size_t yy, std::size_t xx) {
        return ((b * c + ch) * h + yy) * w + xx;
    };
    const auto out_at = [=](std::size_t b, std::size_t o, std::size_t yy, std::size_t xx) {
        return ((b * oc + o) * h + yy) * w + xx;
    };
    const auto w_at = [=](std::size_t o, std::size_t ch, std::size_t ky, std::size_t kx) {
        return ((o * c + ch) * 3 + ky) * 3 + kx;
    };

    Tensor y({n, oc, h, w});
    for (std::size_t b = 0; b < n; ++b)
        for (std::size_t o = 0; o < oc; ++o)
            for (std::size_t yy = 0; yy < h; ++yy)
                for (std::size_t xx = 0; xx < w; ++xx) {
                    double acc = bv.data[o];
                    for (std::size_t ch = 0; ch < c; ++ch)
                        for (std::size_t ky = 0; ky < 3; ++ky) {
                            const std::ptrdiff_t sy = static_cast<std::ptrdiff_t>(yy + ky) - 1;
                            if (sy < 0 || sy >= static_cast<std::ptrdiff_t>(h)) continue;
                            for (std::size_t kx = 0; kx < 3; ++kx) {
                                const std::ptrdiff_t sx = static_cast<std::ptrdiff_t>(xx + kx) - 1;
                                if (sx < 0 || sx >= static_cast<std::ptrdiff_t>(w)) continue;
                                acc += xv.data[in_at(b, ch, sy, sx)] * wv.data[w_at(o, ch, ky, kx)];
                            }
                        }
                    y.data[out_at(b, o, yy, xx)] = acc;
                }

    return tape.record(std::move(y), {x, weight, bias}, [=](Tape& t, std::size_t self) {
        const auto& gy = t.grad(Var{self});
        const auto& xd = t.value(x).data;
        const auto& wd = t.value(weight).data;
        const bool want_x = t.requires_grad(x);
        const bool want_w = t.requires_grad(weight);
        std::vector<double>* gx = want_x ? &t.grad_of(x) : nullptr;
        std::vector<double>* gw = want_w ? &t.grad_of(weight) : nullptr;
        if (t.requires_grad(bias)) {
            auto& gb = t.grad_of(bias);
            for (std::size_t b = 0; b < n; ++b)
                for (std::size_t o = 0; o < oc; ++o)
                    for (std::size_t p = 0; p < h * w; ++p) gb[o] += gy[(b * oc + o) * h * w + p];
        }
        if (!want_x && !want_w) return;
        for (std::size_t b = 0; b < n; ++b)
            for (std::size_t o = 0; o < oc; ++o)
                for (std::size_t yy = 0; yy < h; ++yy)
                    for (std::size_t xx = 0; xx < w; ++xx) {
                        const double g = gy[out_at(b, o, yy, xx)];
                        if (g == 0.0) continue;
                        for (std::size_t ch = 0; ch < c; ++ch)
                            for (std::size_t ky = 0; ky < 3; ++ky) {
                                const std::ptrdiff_t sy = static_cast<std::ptrdiff_t>(yy + ky) - 1;
                                if (sy < 0 || sy >= static_cast<std::ptrdiff_t>(h)) continue;
                                for (std::size_t kx = 0; kx < 3; ++kx) {
                                    const std::ptrdiff_t sx = static_cast<std::ptrdiff_t>(xx + kx) - 1;
                                    if (sx < 0 || sx >= static_cast<std::ptrdiff_t>(w)) continue;
                                    const std::size_t xi = in_at(b, ch, sy, sx);
                                    const std::size_t wi = w_at(o, ch, ky, kx);
                                    if (gx) (*gx)[xi] += g * wd[wi];
                                    if (gw) (*gw)[wi] += g * xd[xi];
                                }
                            }
                    }
    });
}

Var batch_norm(Tape& tape, Var x, Var gamma, Var beta, const BatchNormOptions& opts) {
    const Tensor& xv = tape.value(x);
    if (xv.rank() != 2 && xv.rank() != 4) {
        throw ShapeError("batch_norm: expected [N x F] or [N x C x H x W], got " + to_string(xv.shape));
    }
    const std::size_t n = xv.dim(0), f = xv.dim(1);
    const std::size_t spatial = xv.rank() == 4 ? xv.dim(2) * xv.dim(3) : 1;
    const Tensor& gv = tape.value(gamma);
    const Tensor& bv = tape.value(beta);
    if (gv.size() != f || bv.size() != f) {
        throw ShapeError("batch_norm: " + std::to_string(f) + " features but gamma " + to_string(gv.shape) +
                         " and beta " + to_string(bv.shape));
    }
    if (opts.use_batch_stats && n < 2) {
        throw Error("batch_norm: batch statistics need at least 2 samples, got " + std::to_string(n));
    }
    if (!opts.use_batch_stats && (!opts.running_mean || !opts.running_var ||
                                  opts.running_mean->size() != f || opts.running_var->size() != f)) {
        throw Error("batch_norm: running statistics unavailable");
    }
    const std::size_t m = n * spatial;
    const auto at = [=](std::size_t b, std::size_t ch, std::size_t p) { return (b * f + ch) * spatial + p; };

    std::vector<double> mu(f, 0.0), var(f, 0.0), inv_std(f);
    if (opts.use_batch_stats) {
        for (std::size_t ch = 0; ch < f; ++ch) {
            double s = 0.0;
            for (std::size_t b = 0; b < n; ++b)
                for (std::size_t p = 0; p < spatial; ++p) s += xv.data[at(b, ch, p)];
            mu[ch] = s / static_cast<double>(m);
            double ss = 0.0;
            for (std::size_t b = 0; b < n; ++b)
                for (std::size_t p = 0; p < spatial; ++p) {
                    const double d = xv.data[at(b, ch, p)] - mu[ch];
                    ss += d * d;
                }
            var[ch] = ss / static_cast<double>(m);
        }
        if (opts.update_running && opts.running_mean && opts.running_var) {
            const double unbias = static_cast<double>(m) / static_cast<double>(m - 1);
            for (std::size_t ch = 0; ch < f; ++ch) {
                (*opts.running_mean)[ch] = (1.0 - opts.momentum) * (*opts.running_mean)[ch] + opts.momentum * mu[ch];
                (*opts.running_var)[ch] =
                    (1.0 - opts.momentum) * (*opts.running_var)[ch] + opts.momentum * var[ch] * unbias;
            }
        }
    } else {
        mu = *opts.running_mean;
        var = *opts.running_var;
    }
    for (std::size_t ch = 0; ch < f; ++ch) inv_std[ch] = 1.0 / std::sqrt(var[ch] + opts.eps);

    Tensor xhat(xv.shape);
    Tensor y(xv.shape);
    for (std::size_t b = 0; b < n; ++b)
        for (std::size_t ch = 0; ch < f; ++ch)
            for (std::size_t p = 0; p < spatial; ++p) {
                const std::size_t i = at(b, ch, p);
                xhat.data[i] = (xv.data[i] - mu[ch]) * inv_std[ch];
                y.data[i] = gv.data[ch] * xhat.data[i] + bv.data[ch];
            }

    const bool batch_stats = opts.use_batch_stats;
    return tape.record(std::move(y), {x, gamma, beta},
                       [=, xhat = std::move(xhat.data), inv_std = std::move(inv_std)](Tape& t, std::size_t self) {
                           const auto& gy = t.grad(Var{self});
                           const auto& gam = t.value(gamma).data;
                           if (t.requires_grad(gamma) || t.requires_grad(beta)) {
                               std::vector<double> dg(f, 0.0), db(f, 0.0);
                               for (std::size_t b = 0; b < n; ++b)
                                   for (std::size_t ch = 0; ch < f; ++ch)
                                       for (std::size_t p = 0; p < spatial; ++p) {
                                           const std::size_t i = at(b, ch, p);
                                           dg[ch] += gy[i] * xhat[i];
                                           db[ch] += gy[i];
                                       }
                               accumulate(t, gamma, dg);
                               accumulate(t, beta, db);
                           }
                           if (!t.requires_grad(x)) return;
                           auto& gx = t.grad_of(x);
                           for (std::size_t ch = 0; ch < f; ++ch) {
                               if (!batch_stats) {
                                   for (std::size_t b = 0; b < n; ++b)
                                       for (std::size_t p = 0; p < spatial; ++p) {
                                           const std::size_t i = at(b, ch, p);
                                           gx[i] += gy[i] * gam[ch] * inv_std[ch];
                                       }
                                   continue;
                               }
                               double sum_d = 0.0, sum_dx = 0.0;
                               for (std::size_t b = 0; b < n; ++b)
                                   for (std::size_t p = 0; p < spatial; ++p) {
                                       const std::size_t i = at(b, ch, p);
                                       const double d = gy[i] * gam[ch];
                                       sum_d += d;
                                       sum_dx += d * xhat[i];
                                   }
                               const double md = static_cast<double>(m);
                               for (std::size_t b = 0; b < n; ++b)
                                   for (std::size_t p = 0; p < spatial; ++p) {
                                       const std::size_t i = at(b, ch, p);
                                       const double d = gy[i] * gam[ch];
                                       gx[i] += inv_std[ch] * (d - sum_d / md - xhat[i] * sum_dx / md);
                                   }
                           }
                       });
}

Var relu(Tape& tape, Var x) {
    Tensor y = Tensor(tape.value(x).shape, tape.value(x).data);
    for (double& v : y.data) v = v > 0.0 ? v : 0.0;
    return tape.record(std::move(y), {x}, [x](Tape& t, std::size_t self) {
        const auto& gy = t.grad(Var{self});
        const auto& xv = t.value(x).data;
        auto& gx = t.grad_of(x);
        for (std::size_t i = 0; i < gx.size(); ++i)
            if (xv[i] > 0.0) gx[i] += gy[i];
    });
}

Var avg_pool2(Tape& tape, Var x) {
    const Tensor& xv = tape.value(x);
    expect_rank(xv, 4, "avg_pool2");
    const std::size_t n = xv.dim(0), c = xv.dim(1), h = xv.dim(2), w = xv.dim(3);
    if (h % 2 || w % 2) throw ShapeError("avg_pool2: spatial size must be even, got " + to_string(xv.shape));
    const std::size_t oh = h / 2, ow = w / 2;
    Tensor y({n, c, oh, ow});
    for (std::size_t bc = 0; bc < n * c; ++bc)
        for (std::size_t yy = 0; yy < oh; ++yy)
            for (std::size_t xx = 0; xx < ow; ++xx) {
                const double* src = &xv.data[bc * h * w];
                y.data[(bc * oh + yy) * ow + xx] =
                    0.25 * (src[2 * yy * w + 2 * xx] + src[2 * yy * w + 2 * xx + 1] +
                            src[(2 * yy + 1) * w + 2 * xx] + src[(2 * yy + 1) * w + 2 * xx + 1]);
            }
    return tape.record(std::move(y), {x}, [=](Tape& t, std::size_t self) {
        const auto& gy = t.grad(Var{self});
        auto& gx = t.grad_of(x);
        for (std::size_t bc = 0; bc < n * c; ++bc)
            for (std::size_t yy = 0; yy < oh; ++yy)
                for (std::size_t xx = 0; xx < ow; ++xx) {
                    const double g = 0.25 * gy[(bc * oh + yy) * ow + xx];
                    double* dst = &gx[bc * h * w];
                    dst[2 * yy * w + 2 * xx] += g;
                    dst[2 * yy * w + 2 * xx + 1] += g;
                    dst[(2 * yy + 1) * w + 2 * xx] += g;
                    dst[(2 * yy + 1) * w + 2 * xx + 1] += g;
                }
    });
}

Var flatten(Tape& tape, Var x) {
    const Tensor& xv = tape.value(x);
    if (xv.rank() < 1) throw ShapeError("flatten: scalar input");
    const std::size_t n = xv.dim(0);
    Tensor y({n, n ? xv.size() / n : 0}, xv.data);
    return tape.record(std::move(y), {x}, [x](Tape& t, std::size_t self) {
        accumulate(t, x, t.grad(Var{self}));
    });
}

Var add(Tape& tape, Var a, Var b) {
    const Tensor& av = tape.value(a);
    const Tensor& bv = tape.value(b);
    if (av.shape != bv.shape) {
        throw ShapeError("add: shape mismatch " + to_string(av.shape) + " vs " + to_string(bv.shape));
    }
    Tensor y(av.shape, av.data);
    for (std::size_t i = 0; i < y.size(); ++i) y.data[i] += bv.data[i];
    return tape.record(std::move(y), {a, b}, [a, b](Tape& t, std::size_t self) {
        const auto& g = t.grad(Var{self});
        accumulate(t, a, g);
        accumulate(t, b, g);
    });
}

Var scale(Tape& tape, Var a, double factor) {
    Tensor y(tape.value(a).shape, tape.value(a).data);
    for (double& v : y.data) v *= factor;
    return tape.record(std::move(y), {a}, [a, factor](Tape& t, std::size_t self) {
        const auto& g = t.grad(Var{self});
        auto& ga = t.grad_of(a);
        for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += factor * g[i];
    });
}

Var sum(Tape& tape, Var a) {
    double s = 0.0;
    for (double v : tape.value(a).data) s += v;
    return tape.record(Tensor({1}, {s}), {a}, [a](Tape& t, std::size_t self) {
        const double g = t.grad(Var{self})[0];
        auto& ga = t.grad_of(a);
        for (double& v : ga) v += g;
    });
}

Var mean(Tape& tape, Var a) {
    const std::size_t count = tape.value(a).size();
    if (count == 0) throw ShapeError("mean: empty tensor");
    return scale(tape, sum(tape, a), 1.0 / static_cast<double>(count));
}

Var detach(Tape& tape, Var a) { return tape.constant(Tensor(tape.value(a).shape, tape.value(a).data)); }

Var softmax(Tape& tape, Var logits, double tau) {
    if (!(tau > 0.0)) throw Error("softmax: temperature must be positive");
    const Tensor& xv = tape.value(logits);
    expect_rank(xv, 2, "softmax");
    const std::size_t n = xv.dim(0), c = xv.dim(1);
    Tensor p(xv.shape);
    for (std::size_t i = 0; i < n; ++i) {
        const double* xr = &xv.data[i * c];
        const double mx = *std::max_element(xr, xr + c);
        double z = 0.0;
        for (std::size_t k = 0; k < c; ++k) {
            p.data[i * c + k] = std::exp((xr[k] - mx) / tau);
            z += p.data[i * c + k];
        }
        for (std::size_t k = 0; k < c; ++k) p.data[i * c + k] /= z;
    }
    return tape.record(std::move(p), {logits}, [=](Tape& t, std::size_t self) {
        const auto& gp = t.grad(Var{self});
        const auto& pv = t.value(Var{self}).data;
        auto& gx = t.grad_of(logits);
        for (std::size_t i = 0; i < n; ++i) {
            double dot = 0.0;
            for (std::size_t k = 0; k < c; ++k) dot += gp[i * c + k] * pv[i * c + k];
            for (std::size_t k = 0; k < c; ++k) gx[i * c + k] += pv[i * c + k] * (gp[i * c + k] - dot) / tau;
        }
    });
}

Var cosine_logits(Tape& tape, Var z, const Tensor& prototypes, double tau) {
    if (!(tau > 0.0)) throw Error("cosine_logits: temperature must be positive");
    const Tensor& zv = tape.value(z);
    expect_rank(zv, 2, "cosine_logits");
    expect_rank(prototypes, 2, "cosine_logits");
    const std::size_t n = zv.dim(0), d = zv.dim(1), c = prototypes.dim(0);
    if (prototypes.dim(1) != d) {
        throw ShapeError("cosine_logits: projection dim " + std::to_string(d) + " vs prototype dim " +
                         std::to_string(prototypes.dim(1)));
    }
    std::vector<double> unit_q(c * d, 0.0);
    for (std::size_t k = 0; k < c; ++k) {
        double nn = 0.0;
        for (std::size_t j = 0; j < d; ++j) nn += prototypes.data[k * d + j] * prototypes.data[k * d + j];
        nn = std::sqrt(nn);
        if (nn < 1e-12) continue;
        for (std::size_t j = 0; j < d; ++j) unit_q[k * d + j] = prototypes.data[k * d + j] / nn;
    }
    std::vector<double> norms(n);
    Tensor s({n, c});
    for (std::size_t i = 0; i < n; ++i) {
        double nn = 0.0;
        for (std::size_t j = 0; j < d; ++j) nn += zv.data[i * d + j] * zv.data[i * d + j];
        norms[i] = std::sqrt(nn);
        if (norms[i] < 1e-12) continue;
        for (std::size_t k = 0; k < c; ++k) {
            double dot = 0.0;
            for (std::size_t j = 0; j < d; ++j) dot += zv.data[i * d + j] * unit_q[k * d + j];
            s.data[i * c + k] = dot / norms[i] / tau;
        }
    }
    return tape.record(std::move(s), {z},
                       [=, unit_q = std::move(unit_q), norms = std::move(norms)](Tape& t, std::size_t self) {
                           const auto& gs = t.grad(Var{self});
                           const auto& sv = t.value(Var{self}).data;
                           const auto& zd = t.value(z).data;
                           auto& gz = t.grad_of(z);
                           for (std::size_t i = 0; i < n; ++i) {
                               if (norms[i] < 1e-12) continue;
                               const double inv = 1.0 / norms[i];
                               for (std::size_t k = 0; k < c; ++k) {
                                   const double g = gs[i * c + k] / tau;
                                   if (g == 0.0) continue;
                                   const double cosv = sv[i * c + k] * tau;
                                   for (std::size_t j = 0; j < d; ++j) {
                                       gz[i * d + j] += g * (unit_q[k * d + j] * inv - cosv * zd[i * d + j] * inv * inv);
                                   }
                               }
                           }
                       });
}

Var mean_entropy(Tape& tape, Var probs) {
    const Tensor& pv = tape.value(probs);
    expect_rank(pv, 2, "mean_entropy");
    const std::size_t n = pv.dim(0);
    if (n == 0) throw ShapeError("mean_entropy: empty batch");
    double h = 0.0;
    for (double p : pv.data) h -= p * clamped_log(p);
    h /= static_cast<double>(n);
    return tape.record(Tensor({1}, {h}), {probs}, [probs, n](Tape& t, std::size_t self) {
        const double g = t.grad(Var{self})[0] / static_cast<double>(n);
        const auto& pv = t.value(probs).data;
        auto& gp = t.grad_of(probs);
        for (std::size_t i = 0; i < gp.size(); ++i) {
            const double p = pv[i];
            const double dh = p >= kLogFloor ? -(std::log(p) + 1.0) : -std::log(kLogFloor);
            gp[i] += g * dh;
        }
    });
}

Var mean_rows(Tape& tape, Var probs) {
    const Tensor& pv = tape.value(probs);
    expect_rank(pv, 2, "mean_rows");
    const std::size_t n = pv.dim(0), c = pv.dim(1);
    if (n == 0) throw ShapeError("mean_rows: empty batch");
    Tensor m({1, c});
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < c; ++k) m.data[k] += pv.data[i * c + k];
    for (double& v : m.data) v /= static_cast<double>(n);
    return tape.record(std::move(m), {probs}, [probs, n, c](Tape& t, std::size_t self) {
        const auto& g = t.grad(Var{self});
        auto& gp = t.grad_of(probs);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < c; ++k) gp[i * c + k] += g[k] / static_cast<double>(n);
    });
}

Var cross_entropy(Tape& tape, Var target, Var q) {
    const Tensor& tv = tape.value(target);
    const Tensor& qv = tape.value(q);
    expect_rank(qv, 2, "cross_entropy");
    if (tv.shape != qv.shape) {
        throw ShapeError("cross_entropy: target " + to_string(tv.shape) + " vs prediction " + to_string(qv.shape));
    }
    const std::size_t n = qv.dim(0);
    if (n == 0) throw ShapeError("cross_entropy: empty batch");
    double ce = 0.0;
    for (std::size_t i = 0; i < qv.size(); ++i) ce -= tv.data[i] * clamped_log(qv.data[i]);
    ce /= static_cast<double>(n);
    return tape.record(Tensor({1}, {ce}), {target, q}, [target, q, n](Tape& t, std::size_t self) {
        const double g = t.grad(Var{self})[0] / static_cast<double>(n);
        const auto& tv = t.value(target).data;
        const auto& qv = t.value(q).data;
        if (t.requires_grad(q)) {
            auto& gq = t.grad_of(q);
            for (std::size_t i = 0; i < gq.size(); ++i)
                if (qv[i] >= kLogFloor) gq[i] -= g * tv[i] / qv[i];
        }
        if (t.requires_grad(target)) {
            auto& gt = t.grad_of(target);
            for (std::size_t i = 0; i < gt.size(); ++i) gt[i] -= g * clamped_log(qv[i]);
        }
    });
}

Var softmax_cross_entropy(Tape& tape, Var logits, std::span<const int> labels) {
    const Tensor& xv = tape.value(logits);
    expect_rank(xv, 2, "softmax_cross_entropy");
    const std::size_t n = xv.dim(0), c = xv.dim(1);
    if (labels.size() != n) {
        throw ShapeError("softmax_cross_entropy: " + std::to_string(labels.size()) + " labels for " +
                         std::to_string(n) + " rows");
    }
    std::vector<double> p(n * c);
    std::vector<int> y(labels.begin(), labels.end());
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (y[i] < 0 || static_cast<std::size_t>(y[i]) >= c) {
            throw Error("softmax_cross_entropy: label " + std::to_string(y[i]) + " out of range");
        }
        const double* xr = &xv.data[i * c];
        const double mx = *std::max_element(xr, xr + c);
        double z = 0.0;
        for (std::size_t k = 0; k < c; ++k) z += std::exp(xr[k] - mx);
        const double lse = mx + std::log(z);
        loss += lse - xr[y[i]];
        for (std::size_t k = 0; k < c; ++k) p[i * c + k] = std::exp(xr[k] - lse);
    }
    loss /= static_cast<double>(n);
    return tape.record(Tensor({1}, {loss}), {logits},
                       [=, p = std::move(p), y = std::move(y)](Tape& t, std::size_t self) {
                           const double g = t.grad(Var{self})[0] / static_cast<double>(n);
                           auto& gx = t.grad_of(logits);
                           for (std::size_t i = 0; i < n; ++i)
                               for (std::size_t k = 0; k < c; ++k) {
                                   const double onehot = static_cast<int>(k) == y[i] ? 1.0 : 0.0;
                                   gx[i * c + k] += g * (p[i * c + k] - onehot);
                               }
                       });
}

}  // namespace tta::ops

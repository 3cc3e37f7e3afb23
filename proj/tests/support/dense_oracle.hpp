#pragma once

// Independent reference for the finite-volume step: the stencil is written out cell
// by cell from the ghost-value formulas and solved by Gaussian elimination with
// partial pivoting. Nothing here calls into the library's assembly or solvers.

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

inline std::vector<double> dense_solve(Matrix a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pivot = k;
        for (std::size_t r = k + 1; r < n; ++r) {
            if (std::abs(a[r][k]) > std::abs(a[pivot][k])) {
                pivot = r;
            }
        }
        if (a[pivot][k] == 0.0) {
            throw std::runtime_error("singular dense system");
        }
        std::swap(a[k], a[pivot]);
        std::swap(b[k], b[pivot]);
        for (std::size_t r = k + 1; r < n; ++r) {
            const double m = a[r][k] / a[k][k];
            if (m == 0.0) {
                continue;
            }
            for (std::size_t c = k; c < n; ++c) {
                a[r][c] -= m * a[k][c];
            }
            b[r] -= m * b[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t k = n; k-- > 0;) {
        double s = b[k];
        for (std::size_t c = k + 1; c < n; ++c) {
            s -= a[k][c] * x[c];
        }
        x[k] = s / a[k][k];
    }
    return x;
}

inline std::vector<double> multiply(const Matrix& a, const std::vector<double>& x) {
    std::vector<double> y(a.size(), 0.0);
    for (std::size_t r = 0; r < a.size(); ++r) {
        for (std::size_t c = 0; c < x.size(); ++c) {
            y[r] += a[r][c] * x[c];
        }
    }
    return y;
}

// Side order: left, right, down, up.
struct SideBc {
    bool dirichlet = false;
    double value = 0.0;  // g, or the outward normal derivative q
};

struct Problem {
    int nx = 8;
    int ny = 1;  // 1 means a 1D interval
    double lx = 1.0;
    double ly = 1.0;
    double sigma = 1.0;
    double kappa = 0.0;
    double reaction = 0.0;
    std::array<double, 2> velocity{0.0, 0.0};
    std::array<SideBc, 4> sides{};
    std::vector<double> source;  // empty means zero
};

struct System {
    Matrix a;
    std::vector<double> b;
};

// sigma (phi - old) / dt + div(V phi - kappa grad phi) + r phi = s, integrated over each
// cell. Interior faces average the two cells; a boundary face uses the ghost value
// that either hits g at the face or carries the prescribed normal derivative.
inline System build_step(const Problem& p, const std::vector<double>& old, double dt) {
    const bool two_d = p.ny > 1;
    const int n = p.nx * p.ny;
    const double hx = p.lx / p.nx;
    const double hy = two_d ? p.ly / p.ny : 1.0;
    System s{Matrix(n, std::vector<double>(n, 0.0)), std::vector<double>(n, 0.0)};
    auto id = [&](int i, int j) { return i + p.nx * j; };

    for (int j = 0; j < p.ny; ++j) {
        for (int i = 0; i < p.nx; ++i) {
            const int c = id(i, j);
            s.a[c][c] += p.sigma / dt + p.reaction;
            s.b[c] += p.sigma / dt * old[c] + (p.source.empty() ? 0.0 : p.source[c]);

            struct Dir {
                int di, dj, side;
                double nx, ny, h, area;
            };
            const std::vector<Dir> dirs = two_d ? std::vector<Dir>{{-1, 0, 0, -1, 0, hx, hy},
                                                                   {1, 0, 1, 1, 0, hx, hy},
                                                                   {0, -1, 2, 0, -1, hy, hx},
                                                                   {0, 1, 3, 0, 1, hy, hx}}
                                                : std::vector<Dir>{{-1, 0, 0, -1, 0, hx, 1.0}, {1, 0, 1, 1, 0, hx, 1.0}};
            const double vol = hx * hy;
            for (const Dir& d : dirs) {
                const double vn = p.velocity[0] * d.nx + p.velocity[1] * d.ny;
                const double w = d.area / vol;
                const int ii = i + d.di;
                const int jj = j + d.dj;
                const bool inside = ii >= 0 && ii < p.nx && jj >= 0 && jj < p.ny;
                if (inside) {
                    const int q = id(ii, jj);
                    // outward flux: vn (phi_c + phi_q) / 2 - kappa (phi_q - phi_c) / h
                    s.a[c][c] += w * (0.5 * vn + p.kappa / d.h);
                    s.a[c][q] += w * (0.5 * vn - p.kappa / d.h);
                    continue;
                }
                const SideBc& bc = p.sides[static_cast<std::size_t>(d.side)];
                const double half = 0.5 * d.h;
                if (bc.dirichlet) {
                    // face value g, normal derivative (g - phi_c) / half
                    s.b[c] -= w * vn * bc.value;
                    s.a[c][c] += w * p.kappa / half;
                    s.b[c] += w * p.kappa * bc.value / half;
                } else {
                    // face value phi_c + q half, normal derivative q
                    s.a[c][c] += w * vn;
                    s.b[c] -= w * vn * bc.value * half;
                    s.b[c] += w * p.kappa * bc.value;
                }
            }
        }
    }
    return s;
}

inline std::vector<double> step(const Problem& p, const std::vector<double>& old, double dt) {
    System s = build_step(p, old, dt);
    return dense_solve(std::move(s.a), std::move(s.b));
}

}  // namespace oracle

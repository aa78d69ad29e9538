#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "nlvis/kernels.hpp"
#include "nlvis/mesh.hpp"

namespace nlvis {

enum class FormMode { Visible, Censored, Dyda, Local };

std::string to_string(FormMode mode);
FormMode parse_form_mode(std::string_view text);

struct WeightedPair {
    std::uint32_t i = 0;
    std::uint32_t j = 0;
    double w = 0.0;
};

// A discrete energy on a grid. Nonlocal forms are either materialized (pair
// list sorted by row) or matrix-free (pairs decided on the fly, for grids too
// large to store). The local form is always materialized as forward
// differences in +x and +y.
class FormOperator {
public:
    static FormOperator assemble(const Grid& grid, const PairSet& pairs, const KernelSpec& kernel,
                                 FormMode mode, double p);
    static FormOperator assemble_local(const Grid& grid, double p);
    static FormOperator matrix_free(const Grid& grid, const KernelSpec& kernel, FormMode mode,
                                    double p);

    FormMode mode() const { return mode_; }
    double p() const { return p_; }
    const Grid& grid() const { return *grid_; }
    const KernelSpec& kernel() const { return kernel_; }
    bool materialized() const { return materialized_; }
    bool local() const { return mode_ == FormMode::Local; }

    // Materialized pair list, i < j, sorted by (i, j).
    const std::vector<WeightedPair>& pairs() const;
    std::span<const WeightedPair> row(std::size_t i) const;

    // Whether the unordered pair (i, j) carries weight, and its weight. Valid
    // for nonlocal modes in both representations.
    bool includes(std::size_t i, std::size_t j) const;
    double weight(std::size_t i, std::size_t j) const;

    FormOperator scaled(double c) const;
    // Materialized copy with the pairs matching drop removed.
    FormOperator without(const std::function<bool(const WeightedPair&)>& drop) const;

private:
    FormOperator() = default;
    void build_rows();

    std::shared_ptr<const Grid> grid_;
    KernelSpec kernel_;
    FormMode mode_ = FormMode::Censored;
    double p_ = 2.0;
    bool materialized_ = true;
    double scale_ = 1.0;
    std::vector<WeightedPair> pairs_;
    std::vector<std::size_t> row_start_;
    std::vector<double> delta_;  // boundary distances, dyda only
};

double energy(const FormOperator& form, std::span<const double> u, double p);
double energy(const FormOperator& form, std::span<const double> u);

// u is arbitrary on support and constant elsewhere. Equal to energy() bit for bit.
double energy_sparse(const FormOperator& form, std::span<const double> u,
                     std::span<const std::uint32_t> support, double p);

// classes[i] = -1 marks a free cell; cells sharing a class id >= 0 must carry
// equal values. Same-class pairs contribute nothing and are skipped. Equal to
// energy() bit for bit.
double energy_classes(const FormOperator& form, std::span<const double> u,
                      std::span<const int> classes, double p);

// Coefficients c with E(u) = sum c (u_i - u_j)^2 for p = 2.
std::vector<WeightedPair> quadratic_coefficients(const FormOperator& form);

void write_form_csv(std::ostream& os, const FormOperator& form);

struct CounterexampleResult {
    int n = 0;
    int resolution_factor = 0;
    std::size_t cells = 0;
    std::size_t support = 0;
    double numerator = 0.0;    // ball-restricted energy
    double denominator = 0.0;  // censored energy
    double ratio = 0.0;
};

// Indicator of {x1 + x2 < 1/n} on the unit square with the constant profile,
// h = 1 / (resolution_factor * n).
CounterexampleResult counterexample_ratio(int n, int resolution_factor = 8);

}  // namespace nlvis

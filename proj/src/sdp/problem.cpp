#include "ddlqr/sdp/problem.hpp"

#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "ddlqr/errors.hpp"

namespace ddlqr::sdp {
namespace {

void check_entry(const Problem& prob, const Entry& e, const char* where) {
  if (e.block < 0 || e.block >= static_cast<int>(prob.block_dims.size()))
    throw DimensionError(std::string(where) + ": block index out of range");
  const int d = prob.block_dims[static_cast<std::size_t>(e.block)];
  if (e.row < 0 || e.col < 0 || e.row >= d || e.col >= d)
    throw DimensionError(std::string(where) + ": entry outside its block");
  if (e.row > e.col) throw DimensionError(std::string(where) + ": entries must be upper-triangular");
}

void add_symmetric(Matrix& M, int row, int col, double value) {
  M(row, col) += value;
  if (row != col) M(col, row) += value;
}

}  // namespace

int Problem::add_block(int dim) {
  block_dims.push_back(dim);
  return static_cast<int>(block_dims.size()) - 1;
}

void Problem::validate() const {
  for (int d : block_dims)
    if (d < 1) throw DimensionError("Problem: block dimensions must be positive");
  if (num_free < 0) throw DimensionError("Problem: negative free-variable count");
  if (!free_objective.empty() && static_cast<int>(free_objective.size()) != num_free)
    throw DimensionError("Problem: free_objective length differs from num_free");
  for (const Entry& e : objective) check_entry(*this, e, "objective");
  for (const Constraint& c : constraints) {
    for (const Entry& e : c.entries) check_entry(*this, e, "constraint");
    for (const auto& [j, v] : c.free_terms) {
      (void)v;
      if (j < 0 || j >= num_free) throw DimensionError("constraint: free index out of range");
    }
  }
}

std::vector<Matrix> Problem::objective_blocks() const {
  std::vector<Matrix> C;
  C.reserve(block_dims.size());
  for (int d : block_dims) C.push_back(Matrix::Zero(d, d));
  for (const Entry& e : objective) add_symmetric(C[static_cast<std::size_t>(e.block)], e.row, e.col, e.value);
  return C;
}

Vector Problem::free_objective_vector() const {
  Vector c = Vector::Zero(num_free);
  for (std::size_t j = 0; j < free_objective.size(); ++j) c(static_cast<Eigen::Index>(j)) = free_objective[j];
  return c;
}

LinearForm& LinearForm::add_entry(int block, int row, int col, double coef) {
  if (row > col) std::swap(row, col);
  entries_[{block, row, col}] += coef;
  return *this;
}

LinearForm& LinearForm::add_free(int index, double coef) {
  free_[index] += coef;
  return *this;
}

LinearForm& LinearForm::add_constant(double value) {
  constant_ += value;
  return *this;
}

// coef·X[r,c] with r != c equals ⟨A, X⟩ for A[r,c] = A[c,r] = coef/2.
std::vector<Entry> LinearForm::symmetric_entries() const {
  std::vector<Entry> out;
  out.reserve(entries_.size());
  for (const auto& [key, coef] : entries_) {
    if (coef == 0.0) continue;
    const auto [block, row, col] = key;
    out.push_back({block, row, col, row == col ? coef : 0.5 * coef});
  }
  return out;
}

Constraint LinearForm::equals_zero() const {
  Constraint c;
  c.entries = symmetric_entries();
  for (const auto& [j, coef] : free_)
    if (coef != 0.0) c.free_terms.emplace_back(j, coef);
  c.rhs = -constant_;
  return c;
}

void LinearForm::add_to_objective(Problem& prob) const {
  for (const Entry& e : symmetric_entries()) prob.objective.push_back(e);
  for (const auto& [j, coef] : free_) {
    if (coef == 0.0) continue;
    if (prob.free_objective.empty()) prob.free_objective.assign(static_cast<std::size_t>(prob.num_free), 0.0);
    if (j < 0 || j >= prob.num_free) throw DimensionError("LinearForm: free index out of range");
    prob.free_objective[static_cast<std::size_t>(j)] += coef;
  }
  prob.objective_offset += constant_;
}

void write_triplets(const Problem& prob, std::ostream& out) {
  prob.validate();
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  out << "ddlqr-sdp 1\n";
  out << prob.num_constraints() << ' ' << prob.block_dims.size() << ' ' << prob.num_free << '\n';
  for (std::size_t b = 0; b < prob.block_dims.size(); ++b) out << (b ? " " : "") << prob.block_dims[b];
  out << '\n';
  for (int i = 0; i < prob.num_constraints(); ++i) out << (i ? " " : "") << prob.constraints[static_cast<std::size_t>(i)].rhs;
  out << '\n' << prob.objective_offset << '\n';
  const auto write_entries = [&](int con, const std::vector<Entry>& entries) {
    for (const Entry& e : entries)
      out << con << ' ' << e.block + 1 << ' ' << e.row + 1 << ' ' << e.col + 1 << ' ' << e.value << '\n';
  };
  write_entries(0, prob.objective);
  for (std::size_t j = 0; j < prob.free_objective.size(); ++j)
    if (prob.free_objective[j] != 0.0) out << "0 0 " << j + 1 << " 0 " << prob.free_objective[j] << '\n';
  for (int i = 0; i < prob.num_constraints(); ++i) {
    const Constraint& c = prob.constraints[static_cast<std::size_t>(i)];
    write_entries(i + 1, c.entries);
    for (const auto& [j, v] : c.free_terms) out << i + 1 << " 0 " << j + 1 << " 0 " << v << '\n';
  }
  out.precision(old_precision);
}

Problem read_triplets(std::istream& in) {
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "ddlqr-sdp" || version != 1)
    throw IoError("read_triplets: missing 'ddlqr-sdp 1' header");
  int m = 0, p = 0;
  Problem prob;
  if (!(in >> m >> p >> prob.num_free) || m < 0 || p < 0 || prob.num_free < 0)
    throw IoError("read_triplets: bad size line");
  prob.block_dims.resize(static_cast<std::size_t>(p));
  for (int& d : prob.block_dims)
    if (!(in >> d)) throw IoError("read_triplets: bad block dimensions");
  prob.constraints.resize(static_cast<std::size_t>(m));
  for (Constraint& c : prob.constraints)
    if (!(in >> c.rhs)) throw IoError("read_triplets: bad right-hand side");
  if (!(in >> prob.objective_offset)) throw IoError("read_triplets: bad objective offset");
  int con = 0, block = 0, row = 0, col = 0;
  double value = 0.0;
  while (in >> con >> block >> row >> col >> value) {
    if (con < 0 || con > m) throw IoError("read_triplets: constraint index out of range");
    if (block == 0) {
      if (row < 1 || row > prob.num_free) throw IoError("read_triplets: free index out of range");
      if (con == 0) {
        if (prob.free_objective.empty()) prob.free_objective.assign(static_cast<std::size_t>(prob.num_free), 0.0);
        prob.free_objective[static_cast<std::size_t>(row - 1)] += value;
      } else {
        prob.constraints[static_cast<std::size_t>(con - 1)].free_terms.emplace_back(row - 1, value);
      }
      continue;
    }
    Entry e{block - 1, row - 1, col - 1, value};
    if (con == 0)
      prob.objective.push_back(e);
    else
      prob.constraints[static_cast<std::size_t>(con - 1)].entries.push_back(e);
  }
  if (!in.eof()) throw IoError("read_triplets: malformed entry line");
  try {
    prob.validate();
  } catch (const DimensionError& e) {
    throw IoError(std::string("read_triplets: ") + e.what());
  }
  return prob;
}

}  // namespace ddlqr::sdp

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <complex>
#include <sstream>
#include <vector>

#include "orbitlab/config.hpp"
#include "orbitlab/errors.hpp"
#include "orbitlab/grid.hpp"
#include "orbitlab/legendre.hpp"
#include "orbitlab/measures.hpp"
#include "orbitlab/minors.hpp"
#include "orbitlab/potentials.hpp"
#include "orbitlab/reduction.hpp"
#include "orbitlab/suites.hpp"
#include "orbitlab/transport.hpp"

namespace py = pybind11;
using namespace orbitlab;

namespace {

std::string rational_str(const minors::Rational& r) {
  std::ostringstream out;
  out << r;
  return out.str();
}

minors::MinorSpec make_spec(const std::vector<int>& alphas,
                            const std::vector<int>& betas) {
  return minors::MinorSpec{alphas, betas};
}

Eigen::MatrixXd grid_points(const TensorGrid& grid) {
  Eigen::MatrixXd pts(grid.size(), grid.dims());
  for (Eigen::Index i = 0; i < grid.size(); ++i)
    pts.row(i) = grid.point(i).transpose();
  return pts;
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() =
      "verification toolkit for torus-invariant potentials: exact minor "
      "identities, Legendre conjugates, mixed-Hessian factorization, "
      "invariant densities, and monotone transport";

  const auto base = py::register_exception<Error>(mod, "OrbitlabError");
  py::register_exception<ConfigError>(mod, "ConfigError", base);
  py::register_exception<DomainError>(mod, "DomainError", base);

  // grids ------------------------------------------------------------------
  py::class_<Grid1D>(mod, "Grid1D")
      .def(py::init<Eigen::VectorXd>(), py::arg("nodes"))
      .def_static("uniform", &Grid1D::uniform, py::arg("lo"), py::arg("hi"),
                  py::arg("n"))
      .def_property_readonly("nodes",
                             [](const Grid1D& g) { return g.nodes(); })
      .def("__len__", &Grid1D::size);

  // potentials ---------------------------------------------------------------
  py::enum_<DerivativeMode>(mod, "DerivativeMode")
      .value("analytic", DerivativeMode::analytic)
      .value("finite_difference", DerivativeMode::finite_difference);

  py::class_<DerivativeBundle>(mod, "DerivativeBundle")
      .def_readonly("value", &DerivativeBundle::value)
      .def_readonly("grad_x", &DerivativeBundle::grad_x)
      .def_readonly("hess_xx", &DerivativeBundle::hess_xx)
      .def_readonly("grad_w", &DerivativeBundle::grad_w)
      .def_readonly("hess_wwbar", &DerivativeBundle::hess_wwbar)
      .def_readonly("hess_xwbar", &DerivativeBundle::hess_xwbar);

  py::class_<TorusPotential>(mod, "TorusPotential")
      .def_property_readonly("k", &TorusPotential::k)
      .def_property_readonly("m", &TorusPotential::m)
      .def_property_readonly("family", &TorusPotential::family)
      .def_property_readonly("box_supported", &TorusPotential::box_supported)
      .def("value", &TorusPotential::value, py::arg("x"), py::arg("w"))
      .def("eval_bundle", &TorusPotential::eval_bundle, py::arg("x"),
           py::arg("w"))
      .def("with_offset", &TorusPotential::with_offset, py::arg("c"));

  const auto make_opts = [](double radius_x, double radius_w,
                            DerivativeMode mode, double offset) {
    PotentialOptions opts;
    opts.domain.radius_x = radius_x;
    opts.domain.radius_w = radius_w;
    opts.mode = mode;
    opts.offset = offset;
    return opts;
  };
  mod.def(
      "make_quadratic_separable",
      [=](int k, int m, const Eigen::MatrixXd& A, double radius_x,
          double radius_w, DerivativeMode mode, double offset) {
        return make_quadratic_separable(
            k, m, A, make_opts(radius_x, radius_w, mode, offset));
      },
      py::arg("k"), py::arg("m"), py::arg("A"), py::arg("radius_x") = 6.0,
      py::arg("radius_w") = 2.0, py::arg("mode") = DerivativeMode::analytic,
      py::arg("offset") = 0.0);
  mod.def(
      "make_projective_model",
      [=](int k, int m, double radius_x, double radius_w, DerivativeMode mode,
          double offset) {
        return make_projective_model(
            k, m, make_opts(radius_x, radius_w, mode, offset));
      },
      py::arg("k"), py::arg("m"), py::arg("radius_x") = 6.0,
      py::arg("radius_w") = 2.0, py::arg("mode") = DerivativeMode::analytic,
      py::arg("offset") = 0.0);
  mod.def(
      "make_toric_fs",
      [=](int k, double radius_x, DerivativeMode mode, double offset) {
        return make_toric_fs(k, make_opts(radius_x, 2.0, mode, offset));
      },
      py::arg("k"), py::arg("radius_x") = 6.0,
      py::arg("mode") = DerivativeMode::analytic, py::arg("offset") = 0.0);

  mod.def("mixed_hessian_det",
          [](const TorusPotential& P, const Eigen::VectorXd& x,
             const Eigen::VectorXcd& w) { return mixed_hessian(P, x, w).det; },
          py::arg("P"), py::arg("x"), py::arg("w"));

  // minors -------------------------------------------------------------------
  mod.def(
      "det",
      [](const Eigen::MatrixXd& m) { return minors::det(m); },
      py::arg("matrix"));
  mod.def(
      "multi_minor",
      [](const Eigen::MatrixXd& m, const std::vector<int>& alphas,
         const std::vector<int>& betas) {
        return minors::multi_minor(m, make_spec(alphas, betas));
      },
      py::arg("matrix"), py::arg("alphas"), py::arg("betas"));
  mod.def(
      "perm_minor_sum",
      [](const Eigen::MatrixXd& m, const std::vector<int>& alphas,
         const std::vector<int>& betas) {
        return minors::perm_minor_sum(m, make_spec(alphas, betas));
      },
      py::arg("matrix"), py::arg("alphas"), py::arg("betas"));
  mod.def(
      "verify_minor_identity",
      [](const Eigen::MatrixXd& m, const std::vector<int>& alphas,
         const std::vector<int>& betas, double rel_tol) {
        const auto rep =
            minors::verify_minor_identity(m, make_spec(alphas, betas), rel_tol);
        return py::dict(py::arg("lhs") = rep.lhs, py::arg("rhs") = rep.rhs,
                        py::arg("pass") = rep.pass);
      },
      py::arg("matrix"), py::arg("alphas"), py::arg("betas"),
      py::arg("rel_tol") = 1e-10);
  mod.def(
      "verify_minor_identity_exact",
      [](const Eigen::MatrixXi& m, const std::vector<int>& alphas,
         const std::vector<int>& betas) {
        const auto rep = minors::verify_minor_identity(
            minors::RationalMatrix::from_int(m), make_spec(alphas, betas));
        return py::dict(py::arg("lhs") = rational_str(rep.lhs),
                        py::arg("rhs") = rational_str(rep.rhs),
                        py::arg("pass") = rep.pass);
      },
      py::arg("int_matrix"), py::arg("alphas"), py::arg("betas"));

  // legendre -----------------------------------------------------------------
  py::class_<legendre::NewtonOptions>(mod, "NewtonOptions")
      .def(py::init<>())
      .def_readwrite("tol", &legendre::NewtonOptions::tol)
      .def_readwrite("max_iters", &legendre::NewtonOptions::max_iters)
      .def_readwrite("armijo_c", &legendre::NewtonOptions::armijo_c)
      .def_readwrite("margin_rel", &legendre::NewtonOptions::margin_rel);

  py::class_<legendre::ConjugateResult>(mod, "ConjugateResult")
      .def_readonly("value", &legendre::ConjugateResult::value)
      .def_readonly("argmax", &legendre::ConjugateResult::argmax)
      .def_readonly("iters", &legendre::ConjugateResult::iters)
      .def_readonly("residual", &legendre::ConjugateResult::residual);

  mod.def("conjugate_at",
          [](const TorusPotential& P, const Eigen::VectorXd& p,
             const Eigen::VectorXcd& w, const legendre::NewtonOptions& opts) {
            return legendre::conjugate_at(P, p, w, opts);
          },
          py::arg("P"), py::arg("p"), py::arg("w"),
          py::arg("opts") = legendre::NewtonOptions{});
  mod.def("grad_p_conjugate",
          [](const TorusPotential& P, const Eigen::VectorXd& p,
             const Eigen::VectorXcd& w, const legendre::NewtonOptions& opts) {
            return legendre::grad_p_conjugate(P, p, w, opts);
          },
          py::arg("P"), py::arg("p"), py::arg("w"),
          py::arg("opts") = legendre::NewtonOptions{});
  mod.def("conjugate_w_hessian",
          [](const TorusPotential& P, const Eigen::VectorXd& p,
             const Eigen::VectorXcd& w, const legendre::NewtonOptions& opts) {
            return legendre::conjugate_w_hessian(P, p, w, opts);
          },
          py::arg("P"), py::arg("p"), py::arg("w"),
          py::arg("opts") = legendre::NewtonOptions{});
  mod.def(
      "discrete_llt",
      [](const Eigen::VectorXd& nodes, const Eigen::VectorXd& values) {
        const auto out =
            legendre::discrete_llt(GridFunction1D(Grid1D(nodes), values));
        return py::make_tuple(out.grid.nodes(), out.values);
      },
      py::arg("nodes"), py::arg("values"),
      "grid Legendre transform; returns (slope_nodes, conjugate_values)");

  // reduction ------------------------------------------------------------
  mod.def("momentum_map", &reduction::momentum_map, py::arg("P"), py::arg("x"),
          py::arg("w"));
  mod.def(
      "reduced_form",
      [](const TorusPotential& P, const Eigen::VectorXd& q,
         const Eigen::VectorXcd& w, const legendre::NewtonOptions& opts) {
        const auto rf = reduction::reduced_form(P, q, w, opts);
        return py::dict(py::arg("sigma") = rf.sigma,
                        py::arg("sigma_m") = rf.sigma_m);
      },
      py::arg("P"), py::arg("q"), py::arg("w"),
      py::arg("opts") = legendre::NewtonOptions{});
  mod.def(
      "verify_factorization",
      [](const TorusPotential& P, const Eigen::VectorXd& x,
         const Eigen::VectorXcd& w, double tol) {
        const auto rep = reduction::verify_factorization(P, x, w, tol);
        return py::dict(py::arg("lhs") = rep.lhs, py::arg("rhs") = rep.rhs,
                        py::arg("schur") = rep.schur,
                        py::arg("rel_err_lhs_rhs") = rep.rel_err_lhs_rhs,
                        py::arg("rel_err_lhs_schur") = rep.rel_err_lhs_schur,
                        py::arg("rel_err_rhs_schur") = rep.rel_err_rhs_schur,
                        py::arg("pass") = rep.pass);
      },
      py::arg("P"), py::arg("x"), py::arg("w"), py::arg("tol") = 1e-8);
  mod.def(
      "minor_expansion_crosscheck",
      [](const TorusPotential& P, const Eigen::VectorXd& x,
         const Eigen::VectorXcd& w) {
        const auto rep = reduction::minor_expansion_crosscheck(P, x, w);
        return py::dict(py::arg("expansion") = rep.expansion,
                        py::arg("direct") = rep.direct,
                        py::arg("discrepancy") = rep.discrepancy);
      },
      py::arg("P"), py::arg("x"), py::arg("w"));

  // measures -------------------------------------------------------------
  py::class_<measures::WeightFunction>(mod, "WeightFunction")
      .def_static("constant", &measures::WeightFunction::constant,
                  py::arg("c") = 1.0)
      .def_static("affine_exponential",
                  &measures::WeightFunction::affine_exponential, py::arg("a"))
      .def("__call__", &measures::WeightFunction::operator(), py::arg("p"))
      .def("scaled", &measures::WeightFunction::scaled, py::arg("s"))
      .def("describe", &measures::WeightFunction::describe);

  py::class_<measures::DensityField>(mod, "DensityField")
      .def_readonly("values", &measures::DensityField::values)
      .def_property_readonly(
          "points",
          [](const measures::DensityField& f) { return grid_points(f.grid); })
      .def("mass", &measures::DensityField::mass);

  mod.def("ma_density", &measures::ma_density, py::arg("P"), py::arg("g"),
          py::arg("x"), py::arg("w"));
  mod.def("average_density", &measures::average_density, py::arg("P"),
          py::arg("g"), py::arg("w"), py::arg("x_grid"),
          py::arg("boundary_rel_tol") = 1e-6);
  mod.def(
      "conditional_density",
      [](const TorusPotential& P, const measures::WeightFunction& g,
         const Eigen::VectorXcd& w, const Eigen::VectorXd& x,
         const Grid1D& x_grid) {
        return measures::conditional_density(P, g, w, x, x_grid);
      },
      py::arg("P"), py::arg("g"), py::arg("w"), py::arg("x"),
      py::arg("x_grid"));
  mod.def(
      "conditional_field",
      [](const TorusPotential& P, const measures::WeightFunction& g,
         const Eigen::VectorXcd& w, const Grid1D& x_grid) {
        return measures::conditional_field(P, g, w, x_grid);
      },
      py::arg("P"), py::arg("g"), py::arg("w"), py::arg("x_grid"));
  mod.def(
      "check_normalization",
      [](const TorusPotential& P, const measures::WeightFunction& g,
         const Eigen::VectorXcd& w, const Grid1D& x_grid) {
        return measures::check_normalization(P, g, w, x_grid);
      },
      py::arg("P"), py::arg("g"), py::arg("w"), py::arg("x_grid"));
  mod.def(
      "dh_pushforward",
      [](const TorusPotential& P, const measures::WeightFunction& g,
         const Eigen::VectorXcd& w, const Grid1D& x_grid, Eigen::Index n) {
        const Grid1D p_grid = measures::dh_momentum_grid(P, w, x_grid, n);
        return measures::dh_pushforward(P, g, w, x_grid, p_grid);
      },
      py::arg("P"), py::arg("g"), py::arg("w"), py::arg("x_grid"),
      py::arg("p_nodes") = 513);

  // transport ------------------------------------------------------------
  mod.def("verify_momentum_is_transport",
          [](const TorusPotential& P, const measures::WeightFunction& g,
             const Eigen::VectorXcd& w, const Grid1D& x_grid) {
            return transport::verify_momentum_is_transport(P, g, w, x_grid);
          },
          py::arg("P"), py::arg("g"), py::arg("w"), py::arg("x_grid"));
  mod.def(
      "reconstruct_potential",
      [](const measures::DensityField& eta, const measures::DensityField& nu,
         double anchor_x) {
        const auto u = transport::reconstruct_potential(eta, nu, anchor_x);
        return py::make_tuple(u.grid.nodes(), u.values);
      },
      py::arg("eta"), py::arg("nu"), py::arg("anchor_x") = 0.0,
      "returns (nodes, potential_values), anchored to 0 at anchor_x");
  mod.def(
      "discrete_ot_oracle",
      [](const Eigen::VectorXd& source, const Eigen::VectorXd& target) {
        const auto out = transport::discrete_ot_oracle(source, target);
        return py::dict(py::arg("assignment") = out.assignment,
                        py::arg("cost") = out.cost);
      },
      py::arg("source_points"), py::arg("target_points"));

  // suites -----------------------------------------------------------------
  mod.def(
      "run_suites",
      [](const std::string& config_json, const std::string& suite) {
        config::RunConfig cfg = config_json.empty()
                                    ? config::RunConfig{}
                                    : config::parse_config_text(config_json);
        if (!suite.empty()) cfg.suite = suite;
        config::validate(cfg);
        return suites::report_json(suites::run(cfg));
      },
      py::arg("config_json") = std::string(),
      py::arg("suite") = std::string(),
      "runs the named verification suite(s) and returns the JSON report");
}

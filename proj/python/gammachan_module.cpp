#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gammachan/distributions.hpp"
#include "gammachan/gamma_channel.hpp"
#include "gammachan/gaussian_channel.hpp"
#include "gammachan/report.hpp"

namespace py = pybind11;
using namespace gammachan;

PYBIND11_MODULE(gammachan, m) {
    m.doc() = "quadratic gamma channel laboratory";
    m.attr("__version__") = kCodeVersion;

    py::class_<ChannelParams>(m, "ChannelParams")
        .def(py::init([](double alpha, double lambda, double r) {
                 ChannelParams p{alpha, lambda, r};
                 validate(p);
                 return p;
             }),
             py::arg("alpha"), py::arg("lam"), py::arg("r"))
        .def_readonly("alpha", &ChannelParams::alpha)
        .def_readonly("lam", &ChannelParams::lambda)
        .def_readonly("r", &ChannelParams::r)
        .def("__repr__", [](const ChannelParams& p) {
            return "ChannelParams(alpha=" + std::to_string(p.alpha) +
                   ", lam=" + std::to_string(p.lambda) + ", r=" + std::to_string(p.r) + ")";
        });

    py::class_<InputDistribution>(m, "Input")
        .def_static("gamma", &InputDistribution::gamma, py::arg("shape"), py::arg("rate"))
        .def_static("exponential", &InputDistribution::exponential, py::arg("rate"))
        .def_static("gamma_mixture",
                    [](std::vector<double> weights, std::vector<double> shapes,
                       std::vector<double> rates) {
                        if (shapes.size() != rates.size() || shapes.size() != weights.size()) {
                            throw std::invalid_argument(
                                "gamma_mixture: weights/shapes/rates lengths differ");
                        }
                        std::vector<GammaParams> comps;
                        for (std::size_t i = 0; i < shapes.size(); ++i) {
                            comps.push_back({shapes[i], rates[i]});
                        }
                        return InputDistribution::gamma_mixture(std::move(weights),
                                                                std::move(comps));
                    },
                    py::arg("weights"), py::arg("shapes"), py::arg("rates"))
        .def_static("log_normal", &InputDistribution::log_normal, py::arg("mu"),
                    py::arg("sigma"))
        .def("mean", &InputDistribution::mean)
        .def("moment", &InputDistribution::moment, py::arg("k"))
        .def("log_pdf", &InputDistribution::log_pdf, py::arg("x"))
        .def("id", &InputDistribution::id)
        .def("__repr__", [](const InputDistribution& d) { return "Input(" + d.id() + ")"; });

    m.def(
        "sample",
        [](const InputDistribution& dist, const ChannelParams& p, std::size_t n,
           std::uint64_t seed) {
            const auto records = channel_sample(dist, p, n, seed, 0);
            std::vector<double> x, x_r, v_r;
            x.reserve(n);
            x_r.reserve(n);
            v_r.reserve(n);
            for (const auto& rec : records) {
                x.push_back(rec.x);
                x_r.push_back(rec.x_r);
                v_r.push_back(rec.v_r);
            }
            py::dict out;
            out["x"] = std::move(x);
            out["x_r"] = std::move(x_r);
            out["v_r"] = std::move(v_r);
            return out;
        },
        py::arg("input"), py::arg("params"), py::arg("n"), py::arg("seed"),
        "draw channel records; columns x, x_r, v_r");

    m.def("conditional_log_density", &conditional_log_density, py::arg("params"),
          py::arg("x"), py::arg("u"));
    m.def("conditional_mean", &conditional_mean, py::arg("params"), py::arg("x"));
    m.def("conditional_variance", &conditional_variance, py::arg("params"), py::arg("x"));

    py::class_<ChannelMarginal>(m, "Marginal")
        .def(py::init<const InputDistribution&, const ChannelParams&>(), py::arg("input"),
             py::arg("params"))
        .def("log_density", &ChannelMarginal::log_density, py::arg("u"))
        .def("dlog_density", &ChannelMarginal::dlog_density, py::arg("u"))
        .def("closed_form", &ChannelMarginal::closed_form)
        .def("closed_shape",
             [](const ChannelMarginal& mm) { return mm.closed_params().shape; })
        .def("closed_rate", [](const ChannelMarginal& mm) { return mm.closed_params().rate; });

    m.def(
        "jst_mc",
        [](const InputDistribution& dist, const ChannelParams& p, std::size_t n,
           std::uint64_t seed) {
            const auto est = channel_jst_mc(dist, p, n, seed, 0);
            return py::make_tuple(est.value, est.std_error);
        },
        py::arg("input"), py::arg("params"), py::arg("n"), py::arg("seed"),
        "binned-regression route to the standardized Fisher information");
    m.def("jst_quadrature", &channel_jst_quadrature, py::arg("input"), py::arg("params"));

    m.def("mutual_information", &mutual_information_quadrature, py::arg("input"),
          py::arg("params"));
    m.def(
        "mutual_information_mc",
        [](const InputDistribution& dist, const ChannelParams& p, std::size_t n,
           std::uint64_t seed) {
            const auto est = mutual_information_mc(dist, p, n, seed);
            return py::make_tuple(est.value, est.std_error);
        },
        py::arg("input"), py::arg("params"), py::arg("n"), py::arg("seed"));

    m.def("mgf", &channel_mgf, py::arg("input"), py::arg("params"), py::arg("t"));
    m.def("mgf_window", &channel_mgf_window, py::arg("input"), py::arg("params"));

    m.def("gamma_relative_entropy",
          [](double shape_from, double rate_from, double shape_to, double rate_to) {
              return gamma_relative_entropy({shape_from, rate_from}, {shape_to, rate_to});
          },
          py::arg("shape_from"), py::arg("rate_from"), py::arg("shape_to"),
          py::arg("rate_to"));

    m.def(
        "gaussian_mi",
        [](double r) { return gaussian_mutual_information(standard_normal_input(), r); },
        py::arg("r"), "reference additive-noise channel, standard normal input");
    m.def(
        "gaussian_mmse",
        [](double r) { return gaussian_mmse(standard_normal_input(), r); }, py::arg("r"));
}

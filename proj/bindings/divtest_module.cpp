#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "divtest/asymptotics.hpp"
#include "divtest/divergences.hpp"
#include "divtest/errors.hpp"
#include "divtest/optimizer.hpp"
#include "divtest/simplex.hpp"
#include "divtest/special_functions.hpp"
#include "divtest/tests_engine.hpp"

namespace py = pybind11;
using namespace divtest;

namespace {

std::vector<std::vector<std::int64_t>> list_types(int k, std::int64_t n) {
    check_enumeration_budget(k, n);
    if (type_count(k, n) > 2e7L) raise(errc::budget_exceeded, "too many types to materialize");
    std::vector<std::vector<std::int64_t>> out;
    for (TypeEnumerator e(k, n); e.valid(); e.advance()) out.push_back(e.counts());
    return out;
}

}  // namespace

PYBIND11_MODULE(divtest, m) {
    m.doc() = "divergence-based hypothesis tests: exact errors, calibration and "
              "second-order asymptotics";

    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const error& e) {
            PyErr_SetString(PyExc_ValueError,
                            (std::string(errc_name(e.code())) + ": " + e.what()).c_str());
        }
    });

    py::class_<Distribution>(m, "Distribution")
        .def(py::init<std::vector<double>>())
        .def_property_readonly("probs", &Distribution::probs)
        .def("__len__", &Distribution::size)
        .def("__getitem__", [](const Distribution& d, std::size_t i) {
            if (static_cast<int>(i) >= d.size()) throw py::index_error();
            return d[i];
        });
    m.def("make_distribution", &make_distribution);

    py::class_<TypeDistribution>(m, "TypeDistribution")
        .def(py::init([](std::vector<std::int64_t> counts) {
            TypeDistribution t;
            t.n = 0;
            for (auto c : counts) t.n += c;
            t.counts = std::move(counts);
            return t;
        }))
        .def_readonly("counts", &TypeDistribution::counts)
        .def_readonly("n", &TypeDistribution::n)
        .def("fractions", &TypeDistribution::fractions);

    py::class_<SeededSource>(m, "SeededSource")
        .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("seed"), py::arg("stream") = 0)
        .def("next_u64", &SeededSource::next_u64)
        .def("next_uniform", &SeededSource::next_uniform)
        .def("substream", &SeededSource::substream);

    m.def("empirical_type", [](const std::vector<int>& symbols, int k) {
        return empirical_type(symbols, k);
    });
    m.def("type_count", [](int k, std::int64_t n) { return static_cast<double>(type_count(k, n)); });
    m.def("list_types", &list_types, py::arg("k"), py::arg("n"));
    m.def("log_type_class_prob",
          [](const TypeDistribution& t, const Distribution& q) { return log_type_class_prob(t, q); });
    m.def("sample_type", [](const Distribution& p, std::int64_t n, SeededSource& src) {
        return sample_type(p, n, src);
    });

    // divergences
    m.def("kl", [](const std::vector<double>& t, const Distribution& p) { return kl(t, p); });
    m.def("alpha_div", [](double a, const std::vector<double>& t, const Distribution& p) {
        return alpha_div(a, t, p);
    });
    m.def("renyi_div", [](double a, const std::vector<double>& t, const Distribution& p) {
        return renyi_div(a, t, p);
    });
    m.def("chi_sq", [](const std::vector<double>& t, const Distribution& p) { return chi_sq(t, p); });
    m.def("f_div", [](const std::function<double(double)>& f, const std::vector<double>& t,
                      const Distribution& p) { return f_div(f, t, p); });
    m.def("power_div_statistic", &power_div_statistic);

    py::class_<DivergenceSpec>(m, "DivergenceSpec")
        .def_static("kl", &DivergenceSpec::kl_divergence)
        .def_static("alpha", &DivergenceSpec::alpha_divergence)
        .def_static("renyi", &DivergenceSpec::renyi_divergence)
        .def_static("chi_squared", &DivergenceSpec::chi_squared)
        .def_static("generic_f", &DivergenceSpec::generic_f)
        .def_property_readonly("eta", &DivergenceSpec::eta)
        .def("evaluate", [](const DivergenceSpec& s, const std::vector<double>& t,
                            const Distribution& p) { return s.evaluate(t, p); });
    m.def("eta_of", &eta_of);

    py::class_<PqStatistics>(m, "PqStatistics")
        .def_readonly("kl_divergence", &PqStatistics::kl_divergence)
        .def_readonly("variance", &PqStatistics::variance)
        .def_readonly("alphas", &PqStatistics::alphas);
    m.def("pq_statistics", &pq_statistics);

    // special functions
    m.def("ln_gamma", &ln_gamma);
    m.def("chi2_cdf", &chi2_cdf);
    m.def("chi2_tail", &chi2_tail);
    m.def("chi2_quantile", &chi2_quantile);
    m.def("norm_tail", &norm_tail);
    m.def("norm_quantile", &norm_quantile);
    m.def("erfc_fn", &erfc_fn);

    // tests engine
    py::class_<TestConfig>(m, "TestConfig")
        .def(py::init<DivergenceSpec, double, Distribution>(), py::arg("divergence"),
             py::arg("threshold_r"), py::arg("null_dist"))
        .def_readonly("threshold_r", &TestConfig::threshold_r);

    py::enum_<Decision>(m, "Decision")
        .value("accept_h0", Decision::accept_h0)
        .value("reject_h0", Decision::reject_h0);
    m.def("decide", &decide);

    py::class_<CalibrationResult>(m, "CalibrationResult")
        .def_readonly("r_star", &CalibrationResult::r_star)
        .def_readonly("achieved_type1", &CalibrationResult::achieved_type1)
        .def_readonly("margin_used", &CalibrationResult::margin_used);
    m.def("asymptotic_threshold", &asymptotic_threshold);
    m.def("exact_calibrate", &exact_calibrate);

    py::class_<ErrorValue>(m, "ErrorValue")
        .def_readonly("value", &ErrorValue::value)
        .def_readonly("ln_value", &ErrorValue::ln_value);
    m.def("type1_exact", &type1_exact);
    m.def("type2_exact", &type2_exact);
    m.def("np_statistic", &np_statistic);
    m.def("np_exact_calibrate", &np_exact_calibrate);
    m.def("np_type2_exact", &np_type2_exact);

    py::class_<McEstimate>(m, "McEstimate")
        .def_readonly("estimate", &McEstimate::estimate)
        .def_readonly("ci_low", &McEstimate::ci_low)
        .def_readonly("ci_high", &McEstimate::ci_high)
        .def_readonly("trials", &McEstimate::trials);
    m.def("type1_mc", &type1_mc);
    m.def("type2_mc", &type2_mc);

    // asymptotics
    py::class_<Expansion>(m, "Expansion")
        .def_readonly("first_order", &Expansion::first_order)
        .def_readonly("second_order", &Expansion::second_order)
        .def_readonly("predicted_minus_ln_beta", &Expansion::predicted_minus_ln_beta);
    m.def("predict_divergence_test", &predict_divergence_test);
    m.def("predict_np", &predict_np);
    m.def("kl_quadratic_approx", [](const std::vector<double>& t, const Distribution& p,
                                    const Distribution& q) { return kl_quadratic_approx(t, p, q); });
    m.def("berry_esseen_sup", &berry_esseen_sup);

    py::class_<ResidualSeries>(m, "ResidualSeries")
        .def_readonly("const_coeff", &ResidualSeries::const_coeff)
        .def_readonly("log_coeff", &ResidualSeries::log_coeff)
        .def_readonly("sqrt_coeff", &ResidualSeries::sqrt_coeff);
    m.def("fit_residuals", [](const std::vector<std::tuple<double, double, double>>& rows) {
        std::vector<ResidualPoint> pts;
        for (const auto& [n, exact, predicted] : rows) pts.push_back({n, exact, predicted, 0.0});
        return fit_residuals(pts);
    });

    // optimizer
    m.def("ell", [](const std::vector<double>& gamma, const Distribution& p,
                    const std::vector<double>& alphas) { return ell(gamma, p, alphas); });
    py::class_<FeasibilityData>(m, "FeasibilityData")
        .def_readonly("tau", &FeasibilityData::tau)
        .def_readonly("index_set", &FeasibilityData::index_set)
        .def_readonly("value_set", &FeasibilityData::value_set);
    m.def("feasibility_data", &feasibility_data);

    py::class_<KktSolution>(m, "KktSolution")
        .def_readonly("gamma_star", &KktSolution::gamma_star)
        .def_readonly("min_value", &KktSolution::min_value)
        .def_readonly("r_tilde", &KktSolution::r_tilde)
        .def_readonly("tau", &KktSolution::tau)
        .def_readonly("index_set_I", &KktSolution::index_set_I)
        .def_readonly("value_set_B", &KktSolution::value_set_B);
    m.def("kkt_minimize", &kkt_minimize);

    py::class_<BruteForceResult>(m, "BruteForceResult")
        .def_readonly("value", &BruteForceResult::value)
        .def_readonly("argmin", &BruteForceResult::argmin);
    m.def("brute_force_min", &brute_force_min);

    py::class_<RoundedType>(m, "RoundedType")
        .def_readonly("t_star", &RoundedType::t_star)
        .def_readonly("kappa_bound", &RoundedType::kappa_bound)
        .def_readonly("ell_gap", &RoundedType::ell_gap)
        .def_readonly("permutation", &RoundedType::permutation)
        .def_readonly("case_used", &RoundedType::case_used);
    m.def("round_to_type", &round_to_type);
    m.def("kappa_of", [](const std::vector<double>& p_perm, const std::vector<double>& a_perm,
                         double c_prime, int k, int case_id) {
        return kappa_of(p_perm, a_perm, c_prime, k, case_id);
    });
}

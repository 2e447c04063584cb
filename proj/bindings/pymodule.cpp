// Python bindings for the workbench: instance construction, the attacks,
// the hybrid experiment and the bound tables. Batch entry points return
// plain dict/list objects converted from the JSON result records.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "kacq/experiments.hpp"

namespace py = pybind11;

namespace {

py::object json_to_py(const nlohmann::ordered_json& j) {
    switch (j.type()) {
        case nlohmann::detail::value_t::null: return py::none();
        case nlohmann::detail::value_t::boolean: return py::bool_(j.get<bool>());
        case nlohmann::detail::value_t::number_integer: return py::int_(j.get<long long>());
        case nlohmann::detail::value_t::number_unsigned: return py::int_(j.get<unsigned long long>());
        case nlohmann::detail::value_t::number_float: return py::float_(j.get<double>());
        case nlohmann::detail::value_t::string: return py::str(j.get<std::string>());
        case nlohmann::detail::value_t::array: {
            py::list out;
            for (const auto& item : j) out.append(json_to_py(item));
            return out;
        }
        case nlohmann::detail::value_t::object: {
            py::dict out;
            for (const auto& [key, value] : j.items()) out[py::str(key)] = json_to_py(value);
            return out;
        }
        default: return py::none();
    }
}

kacq::KacInstance make_instance(int n, int t, const std::string& dist, int index, std::uint64_t seed) {
    kacq::KeyDistribution d;
    if (dist == "independent") d = kacq::KeyDistribution::independent();
    else if (dist == "all-equal") d = kacq::KeyDistribution::all_equal();
    else if (dist == "first-last-equal") d = kacq::KeyDistribution::first_last_equal();
    else if (dist == "repeated-except") d = kacq::KeyDistribution::repeated_except(index);
    else throw std::invalid_argument("unknown distribution: " + dist);
    kacq::Rng rng(kacq::mix64(seed));
    return kacq::sample_kac_instance(n, t, d, rng);
}

}  // namespace

PYBIND11_MODULE(kacq, m) {
    m.doc() = "Key-alternating cipher attack workbench (quantum query accounting)";

    py::class_<kacq::Permutation>(m, "Permutation")
        .def_static("identity", &kacq::Permutation::identity, py::arg("n"))
        .def_static("from_table",
                    [](int n, const std::vector<kacq::Word>& table) {
                        return kacq::Permutation::from_table(n, table);
                    })
        .def_static("random",
                    [](int n, std::uint64_t seed) {
                        kacq::Rng rng(kacq::mix64(seed));
                        return kacq::Permutation::random(n, rng);
                    },
                    py::arg("n"), py::arg("seed"))
        .def_property_readonly("n", &kacq::Permutation::n)
        .def("forward", &kacq::Permutation::forward)
        .def("inverse", &kacq::Permutation::inverse)
        .def("table", &kacq::Permutation::table);

    py::class_<kacq::KacInstance>(m, "KacInstance")
        .def_property_readonly("n", [](const kacq::KacInstance& inst) { return inst.n; })
        .def_property_readonly("t", [](const kacq::KacInstance& inst) { return inst.t; })
        .def_property_readonly("keys", [](const kacq::KacInstance& inst) { return inst.schedule.keys; })
        .def("encrypt", &kacq::KacInstance::encrypt)
        .def("decrypt", &kacq::KacInstance::decrypt)
        .def("to_json", [](const kacq::KacInstance& inst) { return kacq::instance_to_json(inst).dump(); });

    m.def("sample_instance", &make_instance, py::arg("n"), py::arg("t"),
          py::arg("dist") = "independent", py::arg("index") = 0, py::arg("seed") = 1,
          "Sample a cipher instance with the given key distribution");

    m.def("classical_attack",
          [](int n, int t, double beta, std::uint64_t seed, int trials, int workers) {
              return json_to_py(kacq::run_classical_batch(n, t, beta, {seed, trials, workers}));
          },
          py::arg("n"), py::arg("t"), py::arg("beta") = 3.0, py::arg("seed") = 1,
          py::arg("trials") = 1, py::arg("workers") = 1);

    m.def("grover_attack",
          [](const std::string& kind, int n, int t, int j, std::uint64_t seed, int trials, int workers) {
              kacq::GroverAttackKind k;
              if (kind == "samekey") k = kacq::GroverAttackKind::SameKey;
              else if (kind == "firstlast") k = kacq::GroverAttackKind::FirstLastEqual;
              else if (kind == "repeated") k = kacq::GroverAttackKind::RepeatedKeys;
              else throw std::invalid_argument("kind must be samekey|firstlast|repeated");
              return json_to_py(kacq::run_grover_batch(k, n, t, j, {seed, trials, workers}));
          },
          py::arg("kind"), py::arg("n"), py::arg("t") = 2, py::arg("j") = 1, py::arg("seed") = 1,
          py::arg("trials") = 1, py::arg("workers") = 1);

    m.def("walk_attack",
          [](int n, int t, int r, std::uint64_t seed, int trials, int workers, int mixed, bool planted) {
              kacq::WalkBatchOptions w;
              if (r > 0) w.r_override = r;
              w.mixed_access_index = mixed;
              w.planted = planted;
              return json_to_py(kacq::run_walk_batch(n, t, w, {seed, trials, workers}));
          },
          py::arg("n"), py::arg("t"), py::arg("r") = 0, py::arg("seed") = 1, py::arg("trials") = 1,
          py::arg("workers") = 1, py::arg("mixed") = -1, py::arg("planted") = false);

    m.def("walk_plan",
          [](int n, int t) {
              const kacq::WalkPlan plan = kacq::plan_parameters(n, t);
              const kacq::WalkCostModel cost = kacq::walk_cost_model(plan);
              py::dict out;
              out["n"] = plan.n;
              out["t"] = plan.t;
              out["gamma"] = plan.gamma();
              out["set_size"] = plan.set_size;
              out["s0_size"] = plan.s0_size;
              out["r"] = plan.r;
              out["epsilon_formula"] = plan.epsilon_formula();
              out["cost_total"] = cost.total;
              return out;
          },
          py::arg("n"), py::arg("t"));

    m.def("hybrid_report",
          [](int n, int q_e, int q_p1, int q_p2, int samples, std::uint64_t seed) {
              return json_to_py(kacq::run_hybrid_report(n, q_e, q_p1, q_p2, samples, seed));
          },
          py::arg("n") = 8, py::arg("q_e") = 1, py::arg("q_p1") = 1, py::arg("q_p2") = 1,
          py::arg("samples") = 500, py::arg("seed") = 1);

    m.def("advantage_bound_q1",
          [](int t, int n, double q_e, const std::vector<double>& q_p) {
              return kacq::advantage_bound_q1(t, n, q_e, q_p);
          });
    m.def("advantage_bound_q2",
          [](int t, int n, const std::vector<double>& q_all) {
              return kacq::advantage_bound_q2(t, n, q_all);
          });
    m.def("advantage_bound_lifted_cipher",
          [](int t, int n, const std::vector<double>& q_p) {
              return kacq::advantage_bound_lifted_cipher(t, n, q_p);
          });

    m.def("sum_capture",
          [](const std::vector<int>& sizes, int n, kacq::Word target, int trials, std::uint64_t seed) {
              kacq::Rng rng(kacq::mix64(seed));
              const auto r = kacq::sum_capture_expectation(sizes, n, target, trials, rng);
              py::dict out;
              out["expected"] = r.expected;
              out["empirical_mean"] = r.empirical_mean;
              out["empirical_std"] = r.empirical_std;
              out["trials"] = r.trials;
              return out;
          },
          py::arg("sizes"), py::arg("n"), py::arg("target") = 0, py::arg("trials") = 1000,
          py::arg("seed") = 1);

    m.def("exponent_table",
          [](int t_max) { return json_to_py(kacq::emit_json(kacq::exponent_table(t_max))); },
          py::arg("t_max") = 4);

    m.def("verify_suite",
          [](int n, std::uint64_t seed) { return json_to_py(kacq::run_verify_suite(n, seed)); },
          py::arg("n") = 6, py::arg("seed") = 1);
}

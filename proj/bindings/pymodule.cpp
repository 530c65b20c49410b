#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qkdsim/attacks.hpp"
#include "qkdsim/circuit.hpp"
#include "qkdsim/codes.hpp"
#include "qkdsim/pauliframe.hpp"
#include "qkdsim/qec_experiments.hpp"
#include "qkdsim/qkd.hpp"
#include "qkdsim/sidechannel.hpp"
#include "qkdsim/statevector.hpp"

namespace py = pybind11;
using namespace qkdsim;

namespace {

ChannelSpec make_channel(const std::string& type, py::kwargs kwargs) {
    auto arg = [&](const char* key) { return kwargs[key].cast<double>(); };
    if (type == "bitflip") return ChannelSpec{BitFlip{arg("p")}};
    if (type == "depolarizing1") return ChannelSpec{Depolarizing1{arg("p")}};
    if (type == "depolarizing2") return ChannelSpec{Depolarizing2{arg("p")}};
    if (type == "pauli") return ChannelSpec{PauliChannel{arg("px"), arg("py"), arg("pz")}};
    if (type == "twirled_ad") return ChannelSpec{TwirledAmplitudeDamping{arg("gamma")}};
    if (type == "dephasing") return ChannelSpec{Dephasing{arg("p")}};
    if (type == "heralded_erase") return ChannelSpec{HeraldedErase{arg("p")}};
    if (type == "deterministic")
        return ChannelSpec{DeterministicPauli{
            PauliString::from_str(kwargs["pauli"].cast<std::string>())}};
    throw std::invalid_argument("unknown channel type: " + type);
}

}  // namespace

PYBIND11_MODULE(_qkdsim, m) {
    m.doc() = "QKD attack emulation and QEC channel monitoring (C++ core)";

    py::class_<PauliString>(m, "PauliString")
        .def(py::init<int>(), py::arg("n_qubits"))
        .def_static("from_str", &PauliString::from_str)
        .def("weight", &PauliString::weight)
        .def("commutes_with", &PauliString::commutes_with)
        .def("__mul__", &PauliString::operator*)
        .def("__str__", &PauliString::str)
        .def("__eq__", &PauliString::operator==);

    py::class_<Circuit>(m, "Circuit")
        .def(py::init<int, int>(), py::arg("n_qubits"), py::arg("n_bits"))
        .def("prep_z", &Circuit::prep_z, py::return_value_policy::reference_internal)
        .def("reset", &Circuit::reset, py::return_value_policy::reference_internal)
        .def("x", &Circuit::x, py::return_value_policy::reference_internal)
        .def("y", &Circuit::y, py::return_value_policy::reference_internal)
        .def("z", &Circuit::z, py::return_value_policy::reference_internal)
        .def("h", &Circuit::h, py::return_value_policy::reference_internal)
        .def("s", &Circuit::s, py::return_value_policy::reference_internal)
        .def("sdg", &Circuit::sdg, py::return_value_policy::reference_internal)
        .def("ry", &Circuit::ry, py::return_value_policy::reference_internal)
        .def("cnot", &Circuit::cnot, py::return_value_policy::reference_internal)
        .def("cz", &Circuit::cz, py::return_value_policy::reference_internal)
        .def("measure_z", &Circuit::measure_z, py::return_value_policy::reference_internal)
        .def("__len__", &Circuit::size)
        .def("__str__", &Circuit::to_text)
        .def_property_readonly("n_qubits", &Circuit::n_qubits)
        .def_property_readonly("n_bits", &Circuit::n_bits);

    m.def("is_clifford", &is_clifford);
    m.def("channel", &make_channel, py::arg("type"), "build a channel spec");
    m.def("attach_circuit_noise", &attach_circuit_noise,
          py::arg("circuit"), py::arg("p_d"), py::arg("include_spam") = true);
    m.def("twirl_amplitude_damping", [](double gamma) {
        PauliChannel pc = twirl_amplitude_damping(gamma);
        return py::make_tuple(pc.px, pc.py, pc.pz);
    });

    m.def("run_shot_bits", [](const Circuit& c, uint64_t seed, uint64_t stream) {
        ShotRng rng(seed, stream);
        return run_shot(c, rng).bits;
    }, py::arg("circuit"), py::arg("seed"), py::arg("stream") = 0);
    m.def("exact_distribution", [](const Circuit& c) {
        return exact_distribution(c);
    });
    m.def("frame_sample_bits", [](const Circuit& c, uint64_t shots, uint64_t seed) {
        IdealTrace trace = precompute_ideal(c);
        std::vector<uint64_t> out;
        out.reserve(shots);
        for (const ShotRecord& r : sample_batch(c, trace, shots, seed))
            out.push_back(r.bits);
        return out;
    }, py::arg("circuit"), py::arg("shots"), py::arg("seed"));

    py::class_<RoundRecord>(m, "RoundRecord")
        .def_readonly("x_a", &RoundRecord::x_a)
        .def_readonly("x_b", &RoundRecord::x_b)
        .def_readonly("x_e", &RoundRecord::x_e)
        .def_property_readonly("b_a", [](const RoundRecord& r) { return int(r.b_a); })
        .def_property_readonly("b_b", [](const RoundRecord& r) { return int(r.b_b); });

    m.def("run_bb84", [](uint64_t rounds, py::object theta, uint64_t seed, double p_d) {
        QkdParams params;
        params.rounds = rounds;
        params.seed = seed;
        params.p_d = p_d;
        if (!theta.is_none()) params.attack = PccmSpec{theta.cast<double>()};
        return run_bb84(params);
    }, py::arg("rounds"), py::arg("theta") = py::none(), py::arg("seed") = 0,
       py::arg("p_d") = 0.0);
    m.def("sift", &sift);
    m.def("correlation", [](const std::vector<RoundRecord>& sifted, const std::string& pair) {
        Pair p = pair == "AB" ? Pair::AB : pair == "AE" ? Pair::AE : Pair::BE;
        CorrelationEstimate est = correlation(sifted, p);
        return py::make_tuple(est.value, est.std_err, est.n_sifted);
    });

    m.def("expected_pccm_correlations", [](double theta) {
        auto [ab, ae] = expected_pccm_correlations(theta);
        return py::make_tuple(ab, ae);
    });
    m.def("optimal_phi", &optimal_phi);

    py::class_<StabilizerCode>(m, "StabilizerCode")
        .def_readonly("name", &StabilizerCode::name)
        .def_readonly("n", &StabilizerCode::n)
        .def_readonly("k", &StabilizerCode::k)
        .def_readonly("d", &StabilizerCode::d)
        .def_readonly("stabilizers", &StabilizerCode::stabilizers)
        .def_readonly("logical_x", &StabilizerCode::logical_x)
        .def_readonly("logical_z", &StabilizerCode::logical_z);

    m.def("code_422", &code_422);
    m.def("code_steane", &code_steane);
    m.def("code_by_name", &code_by_name);
    m.def("encoder_circuit", &encoder_circuit);
    m.def("lut_decode", &lut_decode);

    m.def("analytic_422_bitflip", [](double p) {
        Analytic422 a = analytic_422_bitflip(p);
        return py::make_tuple(a.acceptance, a.flip_pre, a.flip_post);
    });
    m.def("run_422", [](double bitflip_p, int mrounds, double p_d, uint64_t shots,
                        uint64_t seed, int workers) {
        Qec422Params params;
        params.channel = {ChannelSpec{BitFlip{bitflip_p}}};
        params.m = mrounds;
        params.p_d = p_d;
        params.shots = shots;
        params.seed = seed;
        params.workers = workers;
        RoundStats stats = run_422(params);
        return py::make_tuple(stats.acceptance_rate, stats.flip_rate_lq1,
                              stats.flip_rate_lq2);
    }, py::arg("bitflip_p"), py::arg("m"), py::arg("p_d") = 0.0,
       py::arg("shots") = 100000, py::arg("seed") = 0, py::arg("workers") = 1);
    m.def("steane_postselected_flip_exact", &steane_postselected_flip_exact);

    m.def("apply_bias_quench", [](double duration) {
        return apply_bias(BiasModel::quench(), 0, duration);
    });
    m.def("apply_bias_pump", [](double duration) {
        return apply_bias(BiasModel::pump(), 1, duration);
    });
}

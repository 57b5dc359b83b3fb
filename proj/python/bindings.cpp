// Python bindings for the main operations: code construction, compression,
// decompression, bounds, and the analysis sweeps.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "gfqc/analysis.hpp"
#include "gfqc/codec.hpp"
#include "gfqc/experiments.hpp"
#include "gfqc/rng.hpp"

namespace py = pybind11;
using namespace gfqc;

namespace {

// Code + derived structures bundled for the Python side.
struct PyCode {
    SparseCode code;
    FieldTables tables;
    PeelOrder order;

    explicit PyCode(SparseCode c)
        : code(std::move(c)), tables(build_field_tables(code.p)), order(leaf_removal(code)) {}
};

PyCode build_code(int p, std::uint32_t n_bits, double rate, int b, std::uint64_t seed) {
    const std::uint32_t n_sym = (n_bits + static_cast<std::uint32_t>(p) - 1) /
                                static_cast<std::uint32_t>(p);
    const auto m = static_cast<std::uint32_t>(
        std::llround(static_cast<double>(n_sym) * (1.0 - rate)));
    return PyCode(make_code(p, n_sym, m, b, seed));
}

std::vector<std::uint8_t> bytes_to_bits(const py::bytes& data) {
    const std::string s = data;
    const std::vector<std::uint8_t> bytes(s.begin(), s.end());
    return unpack_bits(bytes, bytes.size() * 8);
}

py::bytes bits_to_bytes(const std::vector<std::uint8_t>& bits) {
    const auto packed = pack_bits(bits);
    return py::bytes(reinterpret_cast<const char*>(packed.data()), packed.size());
}

}  // namespace

PYBIND11_MODULE(_gfqc, m) {
    m.doc() = "lossy compression with reduced ultra-sparse GF(q) codes";

    py::class_<PyCode>(m, "Code")
        .def_property_readonly("p", [](const PyCode& c) { return c.code.p; })
        .def_property_readonly("q", [](const PyCode& c) { return c.tables.q; })
        .def_property_readonly("n_sym", [](const PyCode& c) { return c.code.n_sym; })
        .def_property_readonly("m_sym", [](const PyCode& c) { return c.code.m_sym; })
        .def_property_readonly("b", [](const PyCode& c) { return c.code.b; })
        .def_property_readonly("seed", [](const PyCode& c) { return c.code.seed; })
        .def_property_readonly("n_bits",
                               [](const PyCode& c) {
                                   return c.code.n_sym * static_cast<std::uint32_t>(c.code.p);
                               })
        .def_property_readonly("rate_nominal",
                               [](const PyCode& c) { return c.code.nominal_rate(); })
        .def_property_readonly("rate_effective", [](const PyCode& c) { return c.code.rate(); })
        .def_property_readonly("core_size", [](const PyCode& c) { return c.order.core_size(); })
        .def_property_readonly("info_symbols",
                               [](const PyCode& c) { return c.order.info_set.size(); })
        .def("check_degree_histogram",
             [](const PyCode& c) { return c.code.check_degree_histogram(); })
        .def("save",
             [](const PyCode& c, const std::string& path) { write_code_file(c.code, path); })
        .def("__repr__", [](const PyCode& c) {
            std::ostringstream os;
            os << "Code(p=" << c.code.p << ", n_sym=" << c.code.n_sym
               << ", m_sym=" << c.code.m_sym << ", b=" << c.code.b << ", seed=" << c.code.seed
               << ")";
            return os.str();
        });

    m.def("build_code", &build_code, py::arg("p"), py::arg("n_bits"), py::arg("rate"),
          py::arg("b"), py::arg("seed"),
          "PEG-construct an ultra-sparse code and remove b checks");
    m.def("load_code",
          [](const std::string& path) { return PyCode(read_code_file(path)); });

    m.def(
        "compress",
        [](const PyCode& c, const py::bytes& data, double L, double gamma0, double gamma1,
           int ell_max, int t_max, std::uint64_t schedule_seed, bool embed_code) {
            SourceBlock src;
            src.bits = bytes_to_bits(data);
            EncodeParams params;
            params.L = L;
            params.rbp.gamma0 = gamma0;
            params.rbp.gamma1 = gamma1;
            params.rbp.ell_max = ell_max;
            params.rbp.t_max = t_max;
            params.rbp.schedule_seed = schedule_seed;
            params.embed_code = embed_code;
            const EncodeOutcome out = encode(src, c.code, c.order, c.tables, params);
            const auto blob = out.block.serialize();
            py::dict info;
            info["distortion"] = out.achieved_distortion;
            info["iterations"] = out.iterations;
            info["trials"] = out.trials;
            info["fallback"] = out.fallback;
            info["rate"] = out.block.rate();
            return py::make_tuple(
                py::bytes(reinterpret_cast<const char*>(blob.data()), blob.size()), info);
        },
        py::arg("code"), py::arg("data"), py::arg("L") = 1.5, py::arg("gamma0") = 0.92,
        py::arg("gamma1") = 1.0, py::arg("ell_max") = 300, py::arg("t_max") = 5,
        py::arg("schedule_seed") = 0, py::arg("embed_code") = false,
        "compress packed bits; returns (blob, info)");

    m.def(
        "decompress",
        [](const py::bytes& blob, const py::object& code_obj) {
            const std::string s = blob;
            const std::vector<std::uint8_t> bytes(s.begin(), s.end());
            const CompressedBlock block = CompressedBlock::deserialize(bytes);
            if (code_obj.is_none()) {
                const SparseCode code = code_for_block(block);
                const FieldTables tables = build_field_tables(code.p);
                return bits_to_bytes(decode(block, code, leaf_removal(code), tables).bits);
            }
            const auto& c = code_obj.cast<const PyCode&>();
            return bits_to_bytes(decode(block, c.code, c.order, c.tables).bits);
        },
        py::arg("blob"), py::arg("code") = py::none(),
        "reconstruct packed bits; the code is regenerated from the header when omitted");

    m.def("distortion",
          [](const py::bytes& a, const py::bytes& b) {
              return distortion(bytes_to_bits(a), bytes_to_bits(b));
          });

    m.def("rd_distortion", &rd_distortion, py::arg("rate"),
          "Shannon distortion bound D*(R) for a binary symmetric source");
    m.def("rd_rate", &rd_rate, py::arg("distortion"), "1 - H(D)");
    m.def("binary_entropy", &binary_entropy);

    m.def("gf_mul", [](int p, Symbol a, Symbol b) { return build_field_tables(p).mul(a, b); });
    m.def("gf_inv", [](int p, Symbol a) { return build_field_tables(p).inv(a); });
    m.def("gf_add", [](Symbol a, Symbol b) { return FieldTables::add(a, b); });

    m.def(
        "wef_sweep",
        [](const PyCode& c, const std::vector<double>& L_grid, std::uint64_t reference_seed,
           int ell_max, double damping) {
            Rng rng(reference_seed);
            std::vector<Symbol> reference(c.code.n_sym);
            for (auto& s : reference)
                s = static_cast<Symbol>(rng.below(static_cast<std::uint64_t>(c.tables.q)));
            BpParams params;
            params.ell_max = ell_max;
            params.damping = damping;
            const auto points = wef_sweep(c.code, c.tables, L_grid, reference, params);
            py::list out;
            for (const auto& pt : points) {
                py::dict d;
                d["L"] = pt.L;
                d["avg_distance"] = pt.avg_distance;
                d["entropy_density"] = pt.entropy_density;
                d["converged"] = pt.converged;
                d["sweeps"] = pt.sweeps;
                out.append(d);
            }
            return out;
        },
        py::arg("code"), py::arg("L_grid"), py::arg("reference_seed") = 1,
        py::arg("ell_max") = 300, py::arg("damping") = 0.5,
        "weight-enumerator estimate from damped BP fixed points");

    m.def(
        "benchmark",
        [](int p, std::uint32_t n_bits, double rate, int b, std::uint64_t code_seed, double L,
           double gamma0, int samples, std::uint64_t master_seed, int jobs) {
            SweepConfig cfg;
            cfg.p = p;
            cfg.n_bits = n_bits;
            cfg.rate = rate;
            cfg.b = b;
            cfg.code_seed = code_seed;
            cfg.L = L;
            cfg.gamma0 = gamma0;
            cfg.samples = samples;
            cfg.master_seed = master_seed;
            cfg.jobs = jobs;
            const auto out = benchmark(cfg);
            const auto& row = out.rows.at(0);
            py::dict d;
            d["mean_distortion"] = row.mean_distortion;
            d["mean_iterations"] = row.mean_iterations;
            d["mean_trials"] = row.mean_trials;
            d["failure_rate"] = row.failure_rate;
            d["shannon_distortion"] = row.shannon_distortion;
            d["rate_nominal"] = row.rate_nominal;
            d["rate_effective"] = row.rate_effective;
            return d;
        },
        py::arg("p") = 6, py::arg("n_bits") = 1600, py::arg("rate") = 0.33, py::arg("b") = 5,
        py::arg("code_seed") = 7, py::arg("L") = 1.5, py::arg("gamma0") = 0.92,
        py::arg("samples") = 50, py::arg("master_seed") = 1, py::arg("jobs") = 1,
        "mean distortion/iterations over fresh random sources");

#ifdef VERSION_INFO
    m.attr("__version__") = VERSION_INFO;
#else
    m.attr("__version__") = "dev";
#endif
}

// Copyright 2026 The incodec Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "incodec/codec.hpp"
#include "incodec/metrics.hpp"
#include "incodec/training.hpp"
#include "incodec/weights_io.hpp"

namespace py = pybind11;
using namespace incodec;

namespace {

using U8Array = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;
using F32Array = py::array_t<float, py::array::c_style | py::array::forcecast>;

Plane to_plane(const U8Array& a) {
  if (a.ndim() != 2) throw ContractViolation("expected a 2-D uint8 array");
  Plane p(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
  std::copy_n(a.data(), p.samples.size(), p.samples.begin());
  return p;
}

U8Array to_array(const Plane& p) {
  U8Array a({p.height, p.width});
  std::copy(p.samples.begin(), p.samples.end(), a.mutable_data());
  return a;
}

// A luma array, or a (y, u, v) tuple of arrays.
Frame to_frame(const py::object& obj) {
  if (py::isinstance<py::tuple>(obj) || py::isinstance<py::list>(obj)) {
    const auto seq = obj.cast<py::sequence>();
    if (seq.size() != 3) throw ContractViolation("expected (y, u, v)");
    Frame f;
    for (int c = 0; c < 3; ++c) f.plane(c) = to_plane(seq[c].cast<U8Array>());
    if (f.u.width != (f.y.width + 1) / 2 || f.u.height != (f.y.height + 1) / 2 || f.v.width != f.u.width ||
        f.v.height != f.u.height)
      throw ContractViolation("chroma planes must be 4:2:0 subsampled");
    return f;
  }
  return Frame::from_luma(to_plane(obj.cast<U8Array>()));
}

py::tuple frame_tuple(const Frame& f) {
  return py::make_tuple(to_array(f.y), to_array(f.u), to_array(f.v));
}

F32Array to_array(const Tensor& t) {
  F32Array a({t.channels(), t.height(), t.width()});
  std::copy(t.data(), t.data() + t.size(), a.mutable_data());
  return a;
}

Tensor to_tensor(const F32Array& a) {
  if (a.ndim() != 3) throw ContractViolation("expected a (channels, height, width) float array");
  Tensor t(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)), static_cast<int>(a.shape(2)));
  std::copy_n(a.data(), t.size(), t.data());
  return t;
}

std::optional<CodecModels> models_from(const std::optional<std::filesystem::path>& dir) {
  if (!dir) return std::nullopt;
  return load_models(*dir);
}

RDCurve to_curve(const std::vector<std::pair<double, double>>& pts) {
  RDCurve c;
  for (const auto& [r, q] : pts) c.points.push_back({r, q});
  return c;
}

}  // namespace

PYBIND11_MODULE(_incodec, m) {
  m.doc() = "Block-based intra codec with learned in-loop filtering";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<CorruptStream>(m, "CorruptStream", PyExc_ValueError);
  py::register_exception<MissingModel>(m, "MissingModel", PyExc_LookupError);
  py::register_exception<WeightFileError>(m, "WeightFileError", PyExc_OSError);
  py::register_exception<DivergenceError>(m, "DivergenceError", PyExc_ArithmeticError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  m.def("read_pgm", [](const std::filesystem::path& p) { return to_array(read_pgm(p)); });
  m.def("write_pgm", [](const std::filesystem::path& p, const U8Array& a) { write_pgm(p, to_plane(a)); });
  m.def("read_yuv420", [](const std::filesystem::path& p, int w, int h, int index) {
    return frame_tuple(read_yuv420(p, w, h, index));
  }, py::arg("path"), py::arg("width"), py::arg("height"), py::arg("frame") = 0);

  m.def("psnr", [](const U8Array& a, const U8Array& b) { return psnr(to_plane(a), to_plane(b)); });

  m.def(
      "encode",
      [](const py::object& image, int qp, bool inloop_filter, bool neural_mode,
         const std::optional<std::filesystem::path>& models) {
        CodecConfig cfg;
        cfg.qp = qp;
        cfg.inloop_filter = inloop_filter;
        cfg.neural_mode = neural_mode;
        const Frame f = to_frame(image);
        const auto set = models_from(models);
        const EncodeResult r = encode_frame(f, cfg, set ? &*set : nullptr);
        const auto bytes = r.stream.serialize();
        py::dict out;
        out["stream"] = py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
        out["recon"] = frame_tuple(r.recon);
        out["bpp"] = bits_per_pixel(r.stream);
        out["psnr_y"] = psnr(f.y, r.recon.y);
        out["neural_blocks"] = r.stats.neural_blocks();
        return out;
      },
      py::arg("image"), py::arg("qp"), py::arg("inloop_filter") = false,
      py::arg("neural_mode") = false, py::arg("models") = py::none(),
      "Encode a luma array or (y, u, v) tuple; returns stream bytes, reconstruction, bpp and PSNR.");

  m.def(
      "decode",
      [](const py::bytes& stream, const std::vector<std::filesystem::path>& models) {
        const std::string s = stream;
        std::vector<CodecModels> banks;
        for (const auto& dir : models) banks.push_back(load_models(dir));
        return frame_tuple(decode_frame(Bitstream::parse(std::vector<std::uint8_t>(s.begin(), s.end())), banks));
      },
      py::arg("stream"), py::arg("models") = std::vector<std::filesystem::path>{});

  m.def("bd_rate", [](const std::vector<std::pair<double, double>>& anchor,
                      const std::vector<std::pair<double, double>>& test) {
    return bd_rate(to_curve(anchor), to_curve(test));
  }, "Curves as (rate, psnr) pairs.");
  m.def("bd_psnr", [](const std::vector<std::pair<double, double>>& anchor,
                      const std::vector<std::pair<double, double>>& test) {
    return bd_psnr(to_curve(anchor), to_curve(test));
  });

  m.def("parameter_count", [](const std::string& arch, bool with_bias) {
    return count_parameters(build_from_tag(arch),
                            with_bias ? ParamConvention::with_bias : ParamConvention::without_bias);
  }, py::arg("arch"), py::arg("with_bias") = true);

  m.def("init_weights", [](const std::string& arch, const std::filesystem::path& path, std::uint64_t seed) {
    const NetworkGraph g = build_from_tag(arch);
    save_weights(init_weights(g, seed), g, path);
  }, py::arg("arch"), py::arg("path"), py::arg("seed") = 1, "Write Glorot-initialized weights.");

  m.def("forward", [](const std::filesystem::path& weights, const F32Array& x) {
    const WeightStore w = load_weights(weights);
    const NetworkGraph g = build_from_tag(w.arch_tag);
    validate_weights(g, w);
    return to_array(forward(g, w, to_tensor(x)));
  }, py::arg("weights"), py::arg("input"), "Run a weight file's network on a (C, H, W) array.");

  m.def("save_vectors", [](const std::filesystem::path& path,
                           const std::vector<std::pair<F32Array, F32Array>>& cases) {
    std::vector<VectorCase> v;
    for (const auto& [in, out] : cases) v.push_back({to_tensor(in), to_tensor(out)});
    save_vectors(v, path);
  });
  m.def("load_vectors", [](const std::filesystem::path& path) {
    std::vector<std::pair<F32Array, F32Array>> out;
    for (const VectorCase& c : load_vectors(path)) out.emplace_back(to_array(c.input), to_array(c.output));
    return out;
  });
  m.def("max_vector_error", [](const std::filesystem::path& weights, const std::filesystem::path& vectors) {
    const WeightStore w = load_weights(weights);
    const NetworkGraph g = build_from_tag(w.arch_tag);
    return max_vector_error(g, w, load_vectors(vectors));
  }, py::arg("weights"), py::arg("vectors"));

  m.def(
      "train_filter_bank",
      [](const std::vector<std::filesystem::path>& images, const std::filesystem::path& out_dir,
         std::vector<int> qps, long steps, double lr, int batch, int blocks, std::uint64_t seed, int bank_id) {
        std::vector<Plane> planes;
        for (const auto& p : images) planes.push_back(read_pgm(p));
        TrainConfig cfg;
        cfg.steps = steps;
        cfg.learning_rate = lr;
        cfg.batch_size = batch;
        cfg.num_blocks = blocks;
        cfg.seed = seed;
        CodecModels m;
        m.id = bank_id;
        {
          py::gil_scoped_release release;
          m.filter = build_model_bank(planes, qps, cfg);
        }
        std::filesystem::create_directories(out_dir);
        save_models(out_dir, m);
      },
      py::arg("images"), py::arg("out_dir"), py::arg("qps") = std::vector<int>{22, 27, 32, 37},
      py::arg("steps") = 500, py::arg("lr") = 1e-4, py::arg("batch") = 16, py::arg("blocks") = 2,
      py::arg("seed") = 1, py::arg("bank_id") = 1);
}

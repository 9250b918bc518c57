#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "streamprune/error.hpp"
#include "streamprune/pipeline.hpp"
#include "streamprune/spatial.hpp"

namespace py = pybind11;
namespace sp = streamprune;

namespace {

// (H, W, D) float32 array -> TokenGrid. Non-contiguous input is copied.
sp::TokenGrid to_grid(const py::array& array) {
  if (!array.dtype().is(py::dtype::of<float>())) {
    throw py::type_error("expected a float32 array, got " +
                         std::string(py::str(array.dtype())));
  }
  if (array.ndim() != 3) {
    throw py::value_error("expected a 3-d (H, W, D) array, got " +
                          std::to_string(array.ndim()) + " dimensions");
  }
  for (py::ssize_t axis = 0; axis < 3; ++axis) {
    if (array.shape(axis) == 0) {
      static const char* names[] = {"H", "W", "D"};
      throw py::value_error(std::string("dimension ") + names[axis] + " (axis " +
                            std::to_string(axis) + ") is zero");
    }
  }
  auto c = py::array_t<float, py::array::c_style>::ensure(array);
  const auto h = static_cast<std::size_t>(c.shape(0));
  const auto w = static_cast<std::size_t>(c.shape(1));
  const auto d = static_cast<std::size_t>(c.shape(2));
  std::vector<float> data(c.data(), c.data() + h * w * d);
  return sp::TokenGrid::make(w, h, d, std::move(data));
}

sp::Strategy strategy_of(const std::string& name) {
  auto s = sp::parse_strategy(name);
  if (!s) throw py::value_error("unknown strategy '" + name + "'; expected masked, ia, ig, na or none");
  return *s;
}

py::array_t<bool> mask_array(const sp::BoolGrid& m) {
  py::array_t<bool> out({m.height(), m.width()});
  auto v = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < m.height(); ++i)
    for (std::size_t j = 0; j < m.width(); ++j) v(i, j) = m(i, j);
  return out;
}

py::array_t<double> scalar_array(const sp::ScalarGrid& g) {
  py::array_t<double> out({g.height(), g.width()});
  std::copy(g.values().begin(), g.values().end(), out.mutable_data());
  return out;
}

py::tuple prune_frame(const py::array& array, double tau_s, const std::string& strategy) {
  sp::check_tau_s(tau_s);
  const auto s = strategy_of(strategy);
  const auto grid = to_grid(array);
  sp::SpatialPruneResult r;
  {
    py::gil_scoped_release release;
    r = sp::prune_spatial(grid, tau_s, s);
  }
  return py::make_tuple(mask_array(r.drop_mask), scalar_array(r.redundancy));
}

py::dict report_dict(const sp::FrameReport& r) {
  py::dict d;
  d["frame"] = r.frame_index;
  d["total"] = r.total_tokens;
  d["temporal_dropped"] = r.temporal_dropped;
  d["spatial_dropped"] = r.spatial_dropped;
  d["dropped_union"] = r.dropped_union;
  d["retained"] = r.retained;
  d["dropping_ratio"] = r.dropping_ratio;
  d["latency_us"] = r.latency_us;
  return d;
}

class Session {
 public:
  Session(double tau_t, double tau_s, const std::string& strategy,
          std::optional<std::size_t> buffer_capacity) {
    sp::PruneConfig c;
    c.tau_t = tau_t;
    c.tau_s = tau_s;
    c.strategy = strategy_of(strategy);
    c.buffer_capacity = buffer_capacity;
    session_ = std::make_unique<sp::StreamSession>(c);
  }

  py::dict ingest(const py::array& array) {
    auto grid = to_grid(array);
    sp::FrameResult result;
    {
      py::gil_scoped_release release;
      std::lock_guard lock(mutex_);
      result = live().ingest(std::move(grid));
    }
    auto d = report_dict(result.report);
    d["drop_mask"] = mask_array(result.drop_mask);
    return d;
  }

  py::list retained() {
    std::lock_guard lock(mutex_);
    py::list out;
    for (const auto& t : live().assemble_query_context())
      out.append(py::make_tuple(t.frame_index, t.row, t.col));
    return out;
  }

  void close() {
    std::lock_guard lock(mutex_);
    session_.reset();
  }

  bool closed() const { return !session_; }

  py::dict config() {
    std::lock_guard lock(mutex_);
    const auto& c = live().config();
    py::dict d;
    d["tau_t"] = c.tau_t;
    d["tau_s"] = c.tau_s;
    d["strategy"] = std::string(sp::to_string(c.strategy));
    d["buffer_capacity"] = c.buffer_capacity;
    return d;
  }

 private:
  sp::StreamSession& live() {
    if (!session_) throw std::runtime_error("session is closed");
    return *session_;
  }

  std::mutex mutex_;
  std::unique_ptr<sp::StreamSession> session_;
};

}  // namespace

PYBIND11_MODULE(_streamprune, m) {
  m.doc() = "Spatial-temporal video token pruning";

  py::register_exception<sp::Error>(m, "StreamPruneError", PyExc_ValueError);

  m.def("prune_frame", &prune_frame, py::arg("array"), py::arg("tau_s"),
        py::arg("strategy") = "masked",
        "Spatially prune one (H, W, D) float32 frame. Returns (drop_mask, redundancy).");

  py::class_<Session>(m, "Session")
      .def(py::init<double, double, const std::string&, std::optional<std::size_t>>(),
           py::arg("tau_t"), py::arg("tau_s") = 0.5, py::arg("strategy") = "masked",
           py::arg("buffer_capacity") = py::none())
      .def("ingest", &Session::ingest, py::arg("array"))
      .def("retained", &Session::retained)
      .def("close", &Session::close)
      .def_property_readonly("closed", &Session::closed)
      .def_property_readonly("config", &Session::config)
      .def("__enter__", [](Session& s) -> Session& { return s; })
      .def("__exit__", [](Session& s, py::args) { s.close(); });
}

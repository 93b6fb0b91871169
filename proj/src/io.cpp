#include "advac/io.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <fmt/core.h>

namespace advac {

namespace {

void vtk_header(std::string& out, const char* title) {
    out += "# vtk DataFile Version 3.0\n";
    out += title;
    out += "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
}

void vtk_cells(std::string& out, std::size_t n) {
    out += fmt::format("CELLS {} {}\n", n, 4 * n);
    for (std::size_t i = 0; i < n; ++i) out += fmt::format("3 {} {} {}\n", 3 * i, 3 * i + 1, 3 * i + 2);
    out += fmt::format("CELL_TYPES {}\n", n);
    for (std::size_t i = 0; i < n; ++i) out += "5\n";
}

} // namespace

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error(fmt::format("cannot open {} for writing", path.string()));
    f << text;
    if (!f) throw std::runtime_error(fmt::format("write to {} failed", path.string()));
}

void write_mesh_vtk(const std::filesystem::path& path, const Mesh& mesh) {
    std::string out;
    vtk_header(out, "advac mesh");
    const auto& verts = mesh.vertices();
    out += fmt::format("POINTS {} double\n", verts.size());
    for (const Point& p : verts) out += fmt::format("{} {} 0\n", p.x, p.y);
    const std::size_t n = mesh.num_active();
    out += fmt::format("CELLS {} {}\n", n, 4 * n);
    for (ElementId id : mesh.active()) {
        const auto& v = mesh.elements()[id].vertices;
        out += fmt::format("3 {} {} {}\n", v[0], v[1], v[2]);
    }
    out += fmt::format("CELL_TYPES {}\n", n);
    for (std::size_t i = 0; i < n; ++i) out += "5\n";
    write_text(path, out);
}

void write_solution_vtk(const std::filesystem::path& path, const DGFunction& u) {
    const DGSpace& space = u.space();
    const Mesh& mesh = space.mesh();
    const std::size_t n = space.num_elements();
    std::string out;
    vtk_header(out, "advac solution");
    out += fmt::format("POINTS {} double\n", 3 * n);
    for (std::size_t k = 0; k < n; ++k) {
        for (const Point& p : mesh.corners(space.element_id(k))) out += fmt::format("{} {} 0\n", p.x, p.y);
    }
    vtk_cells(out, n);
    out += fmt::format("CELL_DATA {}\nSCALARS generation int 1\nLOOKUP_TABLE default\n", n);
    for (std::size_t k = 0; k < n; ++k) out += fmt::format("{}\n", mesh.elements()[space.element_id(k)].generation);
    out += fmt::format("POINT_DATA {}\nSCALARS u double 1\nLOOKUP_TABLE default\n", 3 * n);
    static constexpr double corners[3][2] = {{0, 0}, {1, 0}, {0, 1}};
    for (std::size_t k = 0; k < n; ++k) {
        for (const auto& c : corners) out += fmt::format("{}\n", evaluate(u, space.element_id(k), c[0], c[1]));
    }
    write_text(path, out);
}

std::string timeseries_csv(std::span<const StepRecord> records) {
    std::string out = "k,t,dofs,newton_iters,residual,max_eta,adapt_cycles\n";
    for (const StepRecord& r : records) {
        out += fmt::format("{},{},{},{},{},{},{}\n", r.k, r.t, r.dofs, r.newton_iters, r.residual, r.max_eta,
                           r.adapt_cycles);
    }
    return out;
}

std::string indicators_csv(std::span<const ElementIndicator> indicators) {
    std::string out = "element_id,eta_R,eta_0,theta,eta_sq\n";
    for (const ElementIndicator& i : indicators) {
        out += fmt::format("{},{},{},{},{}\n", i.element, i.eta_R, i.eta_0, i.theta, i.eta_sq);
    }
    return out;
}

std::string dg_function_csv(const DGFunction& u) {
    const DGSpace& space = u.space();
    std::string out = "element_id,local_dof,value\n";
    for (std::size_t k = 0; k < space.num_elements(); ++k) {
        const auto b = u.block(k);
        for (Eigen::Index j = 0; j < b.size(); ++j) out += fmt::format("{},{},{}\n", space.element_id(k), j, b[j]);
    }
    return out;
}

std::set<int> snapshot_steps(std::span<const double> times, double tau) {
    std::set<int> out;
    for (double t : times) out.insert(static_cast<int>(std::lround(t / tau)));
    return out;
}

OutputWriter::OutputWriter(std::filesystem::path dir, std::string problem, std::string mode,
                           std::set<int> snapshot_steps)
    : dir_(std::move(dir)), prefix_(problem + "_" + mode), snapshot_steps_(std::move(snapshot_steps)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw std::runtime_error(fmt::format("cannot create {}: {}", dir_.string(), ec.message()));
}

std::filesystem::path OutputWriter::file(const std::string& stem) const { return dir_ / (prefix_ + "_" + stem); }

void OutputWriter::snapshot(int k, const DGFunction& u) {
    if (!snapshot_steps_.contains(k)) return;
    const auto path = file(fmt::format("{}.vtk", k));
    write_solution_vtk(path, u);
    written_.push_back(path);
}

void OutputWriter::initial(const DGFunction& u0) { snapshot(0, u0); }

void OutputWriter::adapted(const AdaptEvent& e, std::span<const ElementIndicator> indicators) {
    const auto path = file(fmt::format("indicators_{}.csv", e.k));
    write_text(path, indicators_csv(indicators));
    written_.push_back(path);
    adapt_log_ += fmt::format("k={} refine_marked={} coarsen_marked={} elements {} -> {}\n", e.k, e.refine_marked,
                              e.coarsen_marked, e.elements_before, e.elements_after);
}

void OutputWriter::step(const StepRecord& record, const DGFunction& u) {
    records_.push_back(record);
    snapshot(record.k, u);
}

void OutputWriter::finish() {
    const auto ts = dir_ / "timeseries.csv";
    write_text(ts, timeseries_csv(records_));
    written_.push_back(ts);
    const auto log = file("adapt.log");
    write_text(log, adapt_log_);
    written_.push_back(log);
}

} // namespace advac

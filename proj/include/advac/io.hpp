#pragma once

#include "advac/estimator.hpp"
#include "advac/mesh.hpp"
#include "advac/space.hpp"
#include "advac/stepper.hpp"

#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace advac {

/// Legacy ASCII VTK of the active mesh.
void write_mesh_vtk(const std::filesystem::path& path, const Mesh& mesh);
/// Active mesh with vertices duplicated per element so the point data `u`
/// can jump across edges. Also carries cell data `generation`.
void write_solution_vtk(const std::filesystem::path& path, const DGFunction& u);

std::string timeseries_csv(std::span<const StepRecord> records);
std::string indicators_csv(std::span<const ElementIndicator> indicators);
/// element_id,local_dof,value in element-major order.
std::string dg_function_csv(const DGFunction& u);

void write_text(const std::filesystem::path& path, const std::string& text);

/// Writes the files of one run into a directory:
///   {problem}_{mode}_{k}.vtk               at snapshot steps
///   {problem}_{mode}_indicators_{k}.csv    at every adapt event
///   {problem}_{mode}_adapt.log             one line per adapt event
///   timeseries.csv                         on finish()
class OutputWriter : public RunObserver {
public:
    OutputWriter(std::filesystem::path dir, std::string problem, std::string mode, std::set<int> snapshot_steps);

    void initial(const DGFunction& u0) override;
    void adapted(const AdaptEvent& event, std::span<const ElementIndicator> indicators) override;
    void step(const StepRecord& record, const DGFunction& u) override;
    void finish();

    const std::vector<StepRecord>& records() const { return records_; }
    const std::vector<std::filesystem::path>& written() const { return written_; }

private:
    std::filesystem::path file(const std::string& stem) const;
    void snapshot(int k, const DGFunction& u);

    std::filesystem::path dir_;
    std::string prefix_;
    std::set<int> snapshot_steps_;
    std::vector<StepRecord> records_;
    std::string adapt_log_;
    std::vector<std::filesystem::path> written_;
};

/// Snapshot times to step numbers k = t / tau.
std::set<int> snapshot_steps(std::span<const double> times, double tau);

} // namespace advac

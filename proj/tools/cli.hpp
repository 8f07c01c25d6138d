#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace oitk::cli {

enum ExitCode { kOk = 0, kConfigError = 2, kInputError = 3, kSolverError = 4, kIoError = 5 };

struct JobConfig {
    std::string command;
    std::string source;
    std::string target;
    std::string out_dir = "oitk_out";

    int n = 0;
    int nx = 0;
    int ny = 0;
    double Lx = 0.0;
    double Ly = 0.0;

    int N = 0;
    double eps = 0.0;
    double sigma = 0.05;
    int max_iter = 400;
    double rel_tol = 1e-6;
    double lambda = 1.0;
    double floor = 0.0;
    std::string metric = "conformal";
    bool strang = false;
    bool midpoint = false;
    bool infinite_volume = false;

    double t_end = 1.0;
    int frames = 5;
    int checkpoint_stride = 0;

    std::size_t samples = 100000;
    std::uint64_t seed = 7;
    int bins = 16;
    std::string warp_path;
};

// Parses argv, runs the selected command and returns the exit code.
int run(int argc, char** argv);

// Runs one job and writes its outputs; returns the exit code.
int execute(const JobConfig& cfg);

}  // namespace oitk::cli

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "mcsf/errors.hpp"
#include "mcsf/scenario.hpp"

namespace {

int usage() {
    std::cout <<
        "mcsf -- modified curve shortening flow in a Gibbons-Hawking potential\n"
        "\n"
        "usage:\n"
        "  mcsf run <scenario-file|name> [--out DIR]   run a scenario, write CSV/SVG/report\n"
        "  mcsf list                                   list bundled scenarios\n"
        "  mcsf classify <scenario-file|name>          stability verdict of the initial curve\n"
        "  mcsf oracle <scenario-file|name>            predicted limit chain (convex hull)\n"
        "  mcsf report <run-dir>                       print a stored run report\n"
        "\n"
        "The output root defaults to ./runs and can be overridden with the\n"
        "MCSF_OUTPUT_ROOT environment variable or --out.\n";
    return 0;
}

bool is_validation(mcsf::Errc c) {
    using mcsf::Errc;
    switch (c) {
        case Errc::ParseError:
        case Errc::ValidationError:
        case Errc::NotAlmostCalibrated:
        case Errc::NotStrictlyConvex:
        case Errc::EndpointMismatch:
        case Errc::DuplicateNode:
        case Errc::SelfIntersection:
        case Errc::TooFewNodes:
        case Errc::NodeTooCloseToSingularity:
            return true;
        default:
            return false;
    }
}

int cmd_run(const std::string& which, const std::string& out_root) {
    mcsf::Scenario sc = mcsf::load_scenario(which);
    mcsf::RunReport report = mcsf::execute(sc, out_root);
    std::cout << "scenario:    " << report.scenario << "\n";
    std::cout << "termination: " << report.termination << " at t=" << report.final_time << "\n";
    std::cout << "surgeries:   " << report.events.size() << "\n";
    for (const auto& ev : report.events)
        std::printf("  t=%.6f (+/- %.2g) at singularity %d, junction gap %.4f rad\n", ev.time,
                    ev.half_width, ev.singularity, ev.junction_angle_gap);
    if (report.chain) {
        std::cout << "chain:       " << report.chain->segments.size() << " segment(s), "
                  << (report.chain->a_k_valid ? "A_k valid" : "NOT A_k") << "\n";
        for (const auto& s : report.chain->segments)
            std::printf("  (%.4f,%.4f) -> (%.4f,%.4f)  phase %.4f rad\n", s.a.x, s.a.y, s.b.x,
                        s.b.y, s.phase);
    }
    int failed = 0;
    for (const auto& c : report.checks) {
        std::printf("[%s] %-28s measured=%.6g threshold=%.6g %s\n", c.pass ? "PASS" : "FAIL",
                    c.name.c_str(), c.measured, c.threshold, c.note.c_str());
        if (!c.pass) ++failed;
    }
    std::cout << "outputs in " << report.out_dir << "\n";
    return failed == 0 ? 0 : 3;
}

int cmd_list() {
    for (const auto& info : mcsf::list_scenarios())
        std::printf("%-24s %s\n", info.name.c_str(), info.description.c_str());
    return 0;
}

int cmd_classify(const std::string& which) {
    mcsf::Scenario sc = mcsf::load_scenario(which);
    mcsf::PotentialField field = mcsf::field_of(sc);
    mcsf::PlanarCurve curve = mcsf::build_initial_curve(sc);
    mcsf::StabilityVerdict v = mcsf::classify(field, curve);
    std::cout << mcsf::classification_name(v.classification) << " / "
              << mcsf::flow_classification_name(v.flow_classification) << "\n";
    for (const auto& w : v.witnesses)
        std::printf("  split at singularity %zu: theta_bar_1=%.5f theta_bar_2=%.5f%s\n",
                    w.singularity, w.theta_bar_1, w.theta_bar_2, w.on_chord ? " (on chord)" : "");
    return 0;
}

int cmd_oracle(const std::string& which) {
    mcsf::Scenario sc = mcsf::load_scenario(which);
    mcsf::PotentialField field = mcsf::field_of(sc);
    mcsf::PlanarCurve curve = mcsf::build_initial_curve(sc);
    mcsf::ChainReport chain = mcsf::limit_oracle(field, curve);
    std::cout << chain.segments.size() << " segment(s), phases"
              << (chain.phase_monotone ? " non-increasing" : " NOT monotone") << ":\n";
    for (const auto& s : chain.segments)
        std::printf("  (%.4f,%.4f) -> (%.4f,%.4f)  phase %.5f rad\n", s.a.x, s.a.y, s.b.x, s.b.y,
                    s.phase);
    return 0;
}

int cmd_report(const std::string& dir) {
    std::ifstream in(dir + "/report.json");
    if (!in) {
        std::cerr << "no report.json under " << dir << "\n";
        return 1;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    std::cout << ss.str() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) return usage();
    std::string verb = argv[1];
    try {
        if (verb == "list") return cmd_list();
        if (verb == "run" && argc >= 3) {
            std::string out_root;
            for (int i = 3; i + 1 < argc; ++i)
                if (std::string(argv[i]) == "--out") out_root = argv[i + 1];
            return cmd_run(argv[2], out_root);
        }
        if (verb == "classify" && argc >= 3) return cmd_classify(argv[2]);
        if (verb == "oracle" && argc >= 3) return cmd_oracle(argv[2]);
        if (verb == "report" && argc >= 3) return cmd_report(argv[2]);
        return usage();
    } catch (const mcsf::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return is_validation(e.code()) ? 1 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

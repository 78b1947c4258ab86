#include "lbm/perfmodel.hpp"

#include <cstdio>
#include <stdexcept>

namespace lbm::perf {

int storage_bytes(Precision p) {
    return p == Precision::Double ? 8 : 4;
}

double traffic_model(Scheme scheme, Precision precision) {
    const int transfers = scheme == Scheme::Baseline
                              ? kBaselineScalarTransfers
                              : kFusedScalarTransfers;
    return double(transfers * storage_bytes(precision));
}

KernelProfile canonical_profile(Scheme scheme, Precision precision) {
    KernelProfile p;
    p.bytes_per_update = traffic_model(scheme, precision);
    p.label = std::string(to_string(scheme)) + "-" + to_string(precision);
    return p;
}

double arithmetic_intensity(const KernelProfile& profile) {
    if (!(profile.ops_per_update > 0.0 && profile.bytes_per_update > 0.0)) {
        throw std::domain_error("kernel profile must have positive ops and bytes");
    }
    return profile.ops_per_update / profile.bytes_per_update;
}

RooflineCap roofline_cap(const KernelProfile& profile, const MachineSpec& machine,
                         int n_gpus) {
    if (n_gpus < 1 || n_gpus > machine.gpus_per_node) {
        throw std::domain_error("n_gpus must lie in [1, gpus_per_node]");
    }
    if (!(machine.mem_bandwidth_bytes_per_s > 0.0)) {
        throw std::domain_error("memory bandwidth must be positive");
    }
    RooflineCap cap;
    cap.flops = arithmetic_intensity(profile) *
                machine.mem_bandwidth_bytes_per_s * double(n_gpus);
    cap.lups = cap.flops / profile.ops_per_update;
    return cap;
}

double mlups(std::int64_t updates, double seconds) {
    if (!(seconds > 0.0)) {
        throw std::domain_error("seconds must be positive");
    }
    return double(updates) / seconds / 1e6;
}

double operation_cost(double ets_joules, std::int64_t updates) {
    if (updates <= 0) {
        throw std::domain_error("updates must be positive");
    }
    return ets_joules / (double(updates) / 1e9);
}

CostReport CostReport::make(std::string label, std::optional<double> ets_j,
                            double tts_s, std::int64_t updates) {
    CostReport r;
    r.label = std::move(label);
    r.ets_j = ets_j;
    r.tts_s = tts_s;
    r.updates = updates;
    r.mlups = lbm::perf::mlups(updates, tts_s);
    if (ets_j) r.cost_j_per_gupdate = operation_cost(*ets_j, updates);
    return r;
}

void write_cost_csv(std::ostream& out, std::span<const CostReport> rows) {
    out << "label,ets_j,tts_s,updates,mlups,cost_j_per_gupdate\n";
    char buf[256];
    for (const auto& r : rows) {
        out << r.label << ',';
        if (r.ets_j) {
            std::snprintf(buf, sizeof buf, "%.6f", *r.ets_j);
            out << buf;
        }
        std::snprintf(buf, sizeof buf, ",%.6f,%lld,%.3f,",
                      r.tts_s, static_cast<long long>(r.updates), r.mlups);
        out << buf;
        if (r.cost_j_per_gupdate) {
            std::snprintf(buf, sizeof buf, "%.3f", *r.cost_j_per_gupdate);
            out << buf;
        }
        out << '\n';
    }
}

nlohmann::json cost_json(std::span<const CostReport> rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json j{{"label", r.label},
                         {"tts_s", r.tts_s},
                         {"updates", r.updates},
                         {"mlups", r.mlups}};
        if (r.ets_j) j["ets_j"] = *r.ets_j;
        if (r.cost_j_per_gupdate) j["cost_j_per_gupdate"] = *r.cost_j_per_gupdate;
        arr.push_back(std::move(j));
    }
    return arr;
}

} // namespace lbm::perf

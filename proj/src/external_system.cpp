#include <fcntl.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "sbc/system.hpp"

namespace sbc {

namespace {

class ExternalSystem final : public SystemModel {
public:
    ExternalSystem(std::string command, int n, int m)
        : command_(std::move(command)), n_(n), m_(m) {
        if (n_ < 1 || m_ < 0)
            throw std::invalid_argument("external system: invalid dimensions");
        spawn();
    }

    ~ExternalSystem() override {
        if (to_child_ >= 0) close(to_child_);
        if (from_child_) fclose(from_child_);
        if (pid_ > 0) {
            kill(pid_, SIGTERM);
            int status = 0;
            waitpid(pid_, &status, 0);
        }
    }

    int state_dim() const override { return n_; }
    int input_dim() const override { return m_; }
    std::string name() const override { return "external(" + command_ + ")"; }

private:
    void spawn() {
        int in_pipe[2], out_pipe[2];
        if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0)
            throw std::runtime_error("external system: pipe() failed: " +
                                     std::string(std::strerror(errno)));
        pid_ = fork();
        if (pid_ < 0) throw std::runtime_error("external system: fork() failed");
        if (pid_ == 0) {
            dup2(in_pipe[0], STDIN_FILENO);
            dup2(out_pipe[1], STDOUT_FILENO);
            close(in_pipe[0]);
            close(in_pipe[1]);
            close(out_pipe[0]);
            close(out_pipe[1]);
            execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
            std::perror("exec");
            _exit(127);
        }
        close(in_pipe[0]);
        close(out_pipe[1]);
        to_child_ = in_pipe[1];
        from_child_ = fdopen(out_pipe[0], "r");
        if (!from_child_) throw std::runtime_error("external system: fdopen failed");
    }

    void do_step(std::span<const double> x, std::span<const double> u, RngStream& rng,
                 std::span<double> out) const override {
        std::lock_guard<std::mutex> lock(io_mutex_);

        char num[32];
        std::string req = "STEP";
        auto append = [&](double v) {
            std::snprintf(num, sizeof num, "%.17g", v);
            req += ' ';
            req += num;
        };
        for (double v : x) append(v);
        for (double v : u) append(v);
        req += " | SEED " + std::to_string(rng.seed()) + " " + std::to_string(rng.stream_id());
        req += '\n';

        if (write(to_child_, req.data(), req.size()) != static_cast<ssize_t>(req.size()))
            throw std::runtime_error(name() + ": write to child failed (request: " + req + ")");

        char* line = nullptr;
        std::size_t cap = 0;
        ssize_t len = getline(&line, &cap, from_child_);
        if (len < 0) {
            free(line);
            throw std::runtime_error(name() + ": child closed the pipe or died mid-request");
        }
        std::string resp(line, static_cast<std::size_t>(len));
        free(line);

        std::istringstream in(resp);
        for (int d = 0; d < n_; ++d) {
            if (!(in >> out[static_cast<std::size_t>(d)]))
                throw std::runtime_error(name() + ": malformed response line: " + resp);
        }
        double extra;
        if (in >> extra)
            throw std::runtime_error(name() + ": response has more than " + std::to_string(n_) +
                                     " values: " + resp);
    }

    std::string command_;
    int n_, m_;
    pid_t pid_ = -1;
    int to_child_ = -1;
    FILE* from_child_ = nullptr;
    mutable std::mutex io_mutex_;
};

}  // namespace

std::unique_ptr<SystemModel> external_system(const std::string& command, int state_dim,
                                             int input_dim) {
    return std::make_unique<ExternalSystem>(command, state_dim, input_dim);
}

}  // namespace sbc

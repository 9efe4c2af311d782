#ifndef MSR_SUBPROCESS_HPP
#define MSR_SUBPROCESS_HPP

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <string>
#include <utility>
#include <vector>

#include "msr/common.hpp"

namespace msr {

struct ProcessResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

/// Runs argv[0] with the given arguments, no shell involved; captures
/// stdout and stderr separately. Extra environment entries are applied
/// on top of the inherited environment.
inline ProcessResult run_process(
    const std::vector<std::string>& argv,
    const std::vector<std::pair<std::string, std::string>>& extra_env = {},
    const std::string& cwd = {}) {
  if (argv.empty()) throw Error(Errc::io_error, "empty argv");

  int out_pipe[2];
  int err_pipe[2];
  if (pipe(out_pipe) != 0 || pipe(err_pipe) != 0)
    throw Error(Errc::io_error, "pipe() failed");

  pid_t pid = fork();
  if (pid < 0) throw Error(Errc::io_error, "fork() failed");

  if (pid == 0) {
    dup2(out_pipe[1], STDOUT_FILENO);
    dup2(err_pipe[1], STDERR_FILENO);
    close(out_pipe[0]);
    close(out_pipe[1]);
    close(err_pipe[0]);
    close(err_pipe[1]);
    if (!cwd.empty() && chdir(cwd.c_str()) != 0) _exit(127);
    for (const auto& [k, v] : extra_env) setenv(k.c_str(), v.c_str(), 1);
    std::vector<char*> cargv;
    cargv.reserve(argv.size() + 1);
    for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
    cargv.push_back(nullptr);
    execvp(cargv[0], cargv.data());
    _exit(127);
  }

  close(out_pipe[1]);
  close(err_pipe[1]);

  ProcessResult res;
  struct pollfd fds[2] = {{out_pipe[0], POLLIN, 0}, {err_pipe[0], POLLIN, 0}};
  bool open_[2] = {true, true};
  char buf[8192];
  while (open_[0] || open_[1]) {
    fds[0].events = open_[0] ? POLLIN : 0;
    fds[1].events = open_[1] ? POLLIN : 0;
    if (poll(fds, 2, -1) < 0) {
      if (errno == EINTR) continue;
      break;
    }
    for (int i = 0; i < 2; ++i) {
      if (!open_[i]) continue;
      if (fds[i].revents & (POLLIN | POLLHUP)) {
        ssize_t n = read(fds[i].fd, buf, sizeof(buf));
        if (n > 0) {
          (i == 0 ? res.out : res.err).append(buf, static_cast<size_t>(n));
        } else if (n == 0 || (n < 0 && errno != EINTR)) {
          open_[i] = false;
        }
      } else if (fds[i].revents & (POLLERR | POLLNVAL)) {
        open_[i] = false;
      }
    }
  }
  close(out_pipe[0]);
  close(err_pipe[0]);

  int status = 0;
  while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (WIFEXITED(status)) res.exit_code = WEXITSTATUS(status);
  else if (WIFSIGNALED(status)) res.exit_code = 128 + WTERMSIG(status);
  return res;
}

}  // namespace msr

#endif  // MSR_SUBPROCESS_HPP

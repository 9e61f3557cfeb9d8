#pragma once

#include <condition_variable>
#include <cstddef>
#include <deque>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace clustermerge {

/// Fixed-size FIFO pool. Tasks may submit further tasks.
class ThreadPool {
 public:
  explicit ThreadPool(std::size_t threads);
  ~ThreadPool();

  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

  void submit(std::function<void()> task);

  /// Tasks queued or running.
  std::size_t pending() const;

  /// Blocks until no task is queued or running.
  void wait_idle();

  std::size_t size() const noexcept { return threads_.size(); }

 private:
  void run();

  mutable std::mutex mutex_;
  std::condition_variable work_cv_;
  std::condition_variable idle_cv_;
  std::deque<std::function<void()>> queue_;
  std::size_t active_ = 0;
  bool stopping_ = false;
  std::vector<std::thread> threads_;
};

/// Runs body(i) for i in [0, count) on the pool in contiguous chunks and
/// waits for completion.
void parallel_for(ThreadPool& pool, std::size_t count, std::size_t chunk,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace clustermerge

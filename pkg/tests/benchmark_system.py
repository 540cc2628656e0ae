#!/usr/bin/env python3
"""
System Benchmark Script

Times the exact-arithmetic engine: character evaluation, single identity
checks at growing truncation order, sweep concurrency and configuration loading.
"""

import os
import sys
import time
import json
import platform
from typing import Any, Dict, List, Optional

import psutil

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from spinor_lfunc.characters import CharacterGroup, char_sp, freudenthal_char  # noqa: E402
from spinor_lfunc.config_manager import ConfigManager  # noqa: E402
from spinor_lfunc.identity import sweep, verify_unramified_identity  # noqa: E402
from spinor_lfunc.lfactors import CaseFamily, IdentityCase  # noqa: E402
from spinor_lfunc.parameters import grid_tasks, random_case_a  # noqa: E402


class SystemBenchmark:
    """Benchmark the verification engine"""

    def __init__(self, config_dir: Optional[str] = None):
        self.config_manager = ConfigManager(config_dir)
        self.results = {
            'system_info': self._get_system_info(),
            'benchmarks': {}
        }

    def _get_system_info(self) -> Dict[str, Any]:
        """Get system information"""
        freq = psutil.cpu_freq()
        return {
            'platform': platform.platform(),
            'python_version': platform.python_version(),
            'processor': platform.processor(),
            'timestamp': time.strftime('%Y-%m-%d %H:%M:%S'),
            'memory_total': psutil.virtual_memory().total // (1024**3),  # GB
            'cpu_count': psutil.cpu_count(),
            'cpu_freq': freq.current if freq else None
        }

    def _get_memory_usage(self) -> float:
        """Get current memory usage in MB"""
        return psutil.Process().memory_info().rss / 1024 / 1024

    def benchmark_characters(self) -> Dict[str, Any]:
        """Compare the alternant formula with the weight-table oracle"""
        print("Benchmarking character evaluation...")
        point = (2, 3, 5)
        weights = [(1, 0, 0), (2, 1, 0), (3, 2, 1), (4, 2, 1)]
        results = {}

        for weight in weights:
            label = ",".join(map(str, weight))
            start_time = time.perf_counter()
            alternant = char_sp(weight, point)
            alternant_time = time.perf_counter() - start_time

            start_time = time.perf_counter()
            try:
                oracle = freudenthal_char(CharacterGroup.SP, weight, point)
                results[label] = {
                    'alternant_duration': alternant_time,
                    'oracle_duration': time.perf_counter() - start_time,
                    'agree': oracle == alternant
                }
            except Exception as e:
                results[label] = {'error': str(e)}
            print(f"  ({label}): {results[label]}")

        return results

    def benchmark_identity_orders(self, orders: List[int] = None) -> Dict[str, Any]:
        """Time one identity check as the truncation order grows"""
        if orders is None:
            orders = [4, 8, 12, 16]

        print("Benchmarking identity checks...")
        cases = [IdentityCase(CaseFamily.A_ODD, 1, 1), IdentityCase(CaseFamily.A_EVEN_SPLIT, 1, 2),
                 IdentityCase(CaseFamily.A_ODD, 2, 2)]
        results = {}

        for case in cases:
            pi_data, tau_data = random_case_a(case, 0)
            for order in orders:
                key = f"{case.key}:R={order}"
                start_time = time.perf_counter()
                start_memory = self._get_memory_usage()
                try:
                    report = verify_unramified_identity(case, pi_data, tau_data, order)
                    duration = time.perf_counter() - start_time
                    results[key] = {
                        'duration': duration,
                        'memory_used_mb': self._get_memory_usage() - start_memory,
                        'verdict': report.verdict
                    }
                    print(f"  {key}: {duration:.2f}s, {report.verdict}")
                except Exception as e:
                    print(f"  {key}: Error: {e}")
                    results[key] = {'error': str(e)}

        return results

    def benchmark_sweep_concurrency(self, grid_name: str = "smoke", jobs_list: List[int] = None) -> Dict[str, Any]:
        """Run one grid with different worker counts"""
        if jobs_list is None:
            jobs_list = [1, 2, 4]

        print(f"Benchmarking sweep '{grid_name}'...")
        grid = self.config_manager.sweep_grid(grid_name)
        order = grid.get("order", self.config_manager.load_defaults()["order"])
        results = {}

        for jobs in jobs_list:
            tasks = grid_tasks(grid, base_seed=0, order=order)
            start_time = time.perf_counter()
            report = sweep(tasks, order=order, jobs=jobs, grid=grid_name)
            duration = time.perf_counter() - start_time
            results[str(jobs)] = {
                'duration': duration,
                'instances': len(tasks),
                'counts': report.counts,
                'instances_per_second': len(tasks) / duration if duration > 0 else 0
            }
            print(f"    jobs={jobs}: {duration:.2f}s, {report.counts}")

        return results

    def benchmark_configuration_loading(self, rounds: int = 50) -> Dict[str, Any]:
        """Benchmark configuration loading performance"""
        print("Benchmarking configuration loading performance...")

        start_time = time.perf_counter()
        for _ in range(rounds):
            self.config_manager.load_defaults(force_reload=True)
        defaults_duration = time.perf_counter() - start_time

        examples = self.config_manager.get_example_configs()
        start_time = time.perf_counter()
        for name in examples:
            self.config_manager.load_run_config(os.path.join(self.config_manager.examples_dir, f"{name}.json"))
        examples_duration = time.perf_counter() - start_time

        return {
            'defaults': {'duration': defaults_duration, 'loads_per_second': rounds / defaults_duration},
            'examples': {'duration': examples_duration, 'examples_count': len(examples)}
        }

    def run_full_benchmark(self) -> Dict[str, Any]:
        """Run complete benchmark suite"""
        print("Starting Full System Benchmark")
        print("=" * 50)

        self.results['benchmarks']['characters'] = self.benchmark_characters()
        self.results['benchmarks']['identity_orders'] = self.benchmark_identity_orders()
        self.results['benchmarks']['sweep_concurrency'] = self.benchmark_sweep_concurrency()
        self.results['benchmarks']['configuration_loading'] = self.benchmark_configuration_loading()

        self._generate_summary()
        return self.results

    def _generate_summary(self):
        """Generate benchmark summary"""
        print("\n" + "=" * 50)
        print("BENCHMARK SUMMARY")
        print("=" * 50)

        orders = self.results['benchmarks'].get('identity_orders', {})
        print("\nIdentity checks:")
        print("-" * 30)
        for key, metrics in orders.items():
            if 'error' not in metrics:
                print(f"  {key:<32}: {metrics['duration']:>8.2f}s ({metrics['verdict']})")

        sweeps = self.results['benchmarks'].get('sweep_concurrency', {})
        print("\nSweep concurrency:")
        print("-" * 30)
        for jobs, metrics in sweeps.items():
            print(f"  jobs={jobs:<3}: {metrics['duration']:>8.2f}s ({metrics['instances_per_second']:.1f}/s)")

        print("\n" + "=" * 50)

    def save_results(self, filename: str = None):
        """Save benchmark results to file"""
        if filename is None:
            filename = f"benchmark_results_{int(time.time())}.json"

        try:
            with open(filename, 'w') as f:
                json.dump(self.results, f, indent=2)
            print(f"Benchmark results saved to: {filename}")
        except OSError as e:
            print(f"Error saving results: {e}")


def main():
    """Main entry point"""
    benchmark = SystemBenchmark()

    try:
        results = benchmark.run_full_benchmark()
        benchmark.save_results()

        has_errors = any(
            'error' in metrics
            for category in results['benchmarks'].values()
            for metrics in category.values()
            if isinstance(metrics, dict)
        )
        disagreements = any(not m.get('agree', True) for m in results['benchmarks']['characters'].values())

        sys.exit(1 if has_errors or disagreements else 0)

    except KeyboardInterrupt:
        print("\nBenchmark interrupted by user")
        sys.exit(1)
    except Exception as e:
        print(f"Benchmark failed: {e}")
        sys.exit(1)


if __name__ == '__main__':
    main()

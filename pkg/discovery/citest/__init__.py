"""Conditional independence tests and kernel dependence measures."""

from discovery.citest.hsic import hsic_dependence
from discovery.citest.kci import kci_test
from discovery.citest.kernels import center_gram, median_bandwidth, rbf_gram
from discovery.citest.parcorr import CIOutcome, partial_correlation_test
from discovery.citest.tester import CITester, CITestResult, format_test_log

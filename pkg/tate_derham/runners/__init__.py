from tate_derham.runners.base import BaseSuiteRunner, Suite
from tate_derham.runners.local import SequentialSuiteRunner, ThreadPoolSuiteRunner

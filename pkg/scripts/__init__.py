from .instance_io import InstanceFile, InstanceFormatError, dumps_instance, load_instance, save_instance
from .curve_exporter import curve_frame, export_curves
from .verification_suites import SUITES, VerificationRunner

__all__ = [
    'InstanceFile',
    'InstanceFormatError',
    'dumps_instance',
    'load_instance',
    'save_instance',
    'curve_frame',
    'export_curves',
    'SUITES',
    'VerificationRunner'
]

"""Module for Dataset Input/Output via HDF5 format."""
import h5py

import numpy as np

from mixreg.numeric.data_generation.dataset import Dataset
from mixreg.utils.precision import get_real_t

DATASET_FORMAT_NAME = "mixreg-dataset"
DATASET_FORMAT_VERSION = 1


class DatasetIO:
    r"""IO class for Dataset save and load.

    Attributes
    ----------
    real_dtype: data type
        Data type the design and response are stored with. Estimation always
        runs in double precision, single is only meant for storage.

    The HDF5 file has a flat layout:
                    ______________/root______________
                   /         |          |            \
               design    response    labels      (attrs: format, version,
               (n, d)      (n,)    (n,) optional    n, d, seed)
    """

    def __init__(self, precision: str = "double"):
        """Class initialiser."""
        self.real_dtype = get_real_t(precision)

    def save(self, h5_file_name, dataset: Dataset):
        """Save `dataset` to an hdf5 file.

        Attributes
        ----------
        h5_file_name: str
            String containing name of the hdf5 file.
        dataset: Dataset
            Dataset to be written, labels are stored when present.
        """
        with h5py.File(h5_file_name, "w") as f:
            f.attrs["format"] = DATASET_FORMAT_NAME
            f.attrs["version"] = DATASET_FORMAT_VERSION
            f.attrs["n"] = dataset.num_samples
            f.attrs["d"] = dataset.dim
            f.attrs["seed"] = np.uint64(dataset.seed)
            # no timestamps, so identical datasets give identical files
            f.create_dataset(
                "design",
                data=dataset.design.astype(self.real_dtype),
                track_times=False,
            )
            f.create_dataset(
                "response",
                data=dataset.response.astype(self.real_dtype),
                track_times=False,
            )
            if dataset.labels is not None:
                f.create_dataset("labels", data=dataset.labels, track_times=False)

    def load(self, h5_file_name) -> Dataset:
        """Load a Dataset from an hdf5 file written by `save`.

        Attributes
        ----------
        h5_file_name: str
            String containing name of the hdf5 file.
        """
        with h5py.File(h5_file_name, "r") as f:
            if f.attrs.get("format") != DATASET_FORMAT_NAME:
                raise ValueError(f"{h5_file_name} is not a {DATASET_FORMAT_NAME} file")
            design = np.array(f["design"], dtype=np.float64)
            response = np.array(f["response"], dtype=np.float64)
            labels = np.array(f["labels"]) if "labels" in f else None
            seed = int(f.attrs["seed"])
            if design.shape != (int(f.attrs["n"]), int(f.attrs["d"])):
                raise ValueError(
                    f"design shape {design.shape} does not match the stored "
                    f"(n, d) = ({int(f.attrs['n'])}, {int(f.attrs['d'])})"
                )
        return Dataset(design=design, response=response, labels=labels, seed=seed)

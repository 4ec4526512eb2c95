from types import FunctionType

from tqdm.auto import tqdm


class WarningManager:

    def __init__(self):
        self.history = set()

    def warn_once(self, text):
        if text not in self.history:
            # TODO: use warn and provide custom handler
            print(text)
            self.history.add(text)

    def reset(self):
        self.history.clear()


def map_with_shared(func: FunctionType, iterable, shared_args=(), processes=1, progress=False):
    """Map func(item, *shared_args) over iterable, preserving the input order.

    processes=1 keeps everything in the current process; otherwise the work
    is spread over an enhanced_multiprocessing pool.
    """
    items = list(iterable)
    if processes == 1:
        if progress:
            items = tqdm(items)
        return [func(item, *shared_args) for item in items]

    from enhanced_multiprocessing import Pool

    pool = Pool(processes, progress_bar=progress)
    return list(pool.imap(func, items, shared_args=shared_args))
